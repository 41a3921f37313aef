// Recurrent building blocks shared by the completion model and the two
// understanding models. All forward passes record onto a caller-owned Tape.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "elcmp/tape.hpp"

namespace elcmp {

// Single LSTM cell. Gate layout inside the fused weight is [i, f, g, o].
struct LstmLayer {
  Parameter w;  // [4H x (in + H)]
  Parameter b;  // [4H]
  std::size_t in_dim = 0;
  std::size_t hidden = 0;

  LstmLayer() = default;
  LstmLayer(const std::string& name, std::size_t in, std::size_t h);

  void init(Rng& rng);
  std::pair<Tape::Var, Tape::Var> step(Tape& t, Tape::Var x, Tape::Var h_prev,
                                       Tape::Var c_prev);
  void collect(std::vector<Parameter*>& out);
};

struct EncoderOut {
  std::vector<Tape::Var> seq;  // per position, concat(fwd, bwd) of the top layer
  std::vector<Tape::Var> final_h_fwd, final_c_fwd;  // one per layer
  std::vector<Tape::Var> final_h_bwd, final_c_bwd;
};

// Stacked bidirectional LSTM. Layer l > 0 consumes the concatenated
// fwd/bwd outputs of layer l-1.
struct BiLstmEncoder {
  std::vector<LstmLayer> fwd, bwd;
  std::size_t in_dim = 0, hidden = 0, depth = 0;

  BiLstmEncoder() = default;
  BiLstmEncoder(const std::string& name, std::size_t in, std::size_t h, std::size_t layers);

  void init(Rng& rng);
  EncoderOut encode(Tape& t, const std::vector<Tape::Var>& inputs, double dropout,
                    Rng& rng, bool training);
  void collect(std::vector<Parameter*>& out);
};

// He-et-al style stack of alternating-direction LSTMs with highway gates
// between layers. Layer 0 runs forward, layer 1 backward, and so on.
struct HighwayLstmStack {
  std::vector<LstmLayer> layers;
  std::vector<Parameter> gate_w, gate_b;  // highway transform gates, one per layer
  Parameter in_proj;                      // projects the input to `hidden` for layer 0
  std::size_t in_dim = 0, hidden = 0, depth = 0;

  HighwayLstmStack() = default;
  HighwayLstmStack(const std::string& name, std::size_t in, std::size_t h,
                   std::size_t layers_n);

  void init(Rng& rng);
  std::vector<Tape::Var> run(Tape& t, const std::vector<Tape::Var>& inputs,
                             double dropout, Rng& rng, bool training);
  void collect(std::vector<Parameter*>& out);
};

}  // namespace elcmp
