#include "elcmp/nn.hpp"

namespace elcmp {

LstmLayer::LstmLayer(const std::string& name, std::size_t in, std::size_t h)
    : w(name + ".w", {4 * h, in + h}),
      b(name + ".b", {4 * h}),
      in_dim(in),
      hidden(h) {}

void LstmLayer::init(Rng& rng) {
  w.init_xavier(rng);
  b.value.fill(0.0);
}

std::pair<Tape::Var, Tape::Var> LstmLayer::step(Tape& t, Tape::Var x,
                                                Tape::Var h_prev, Tape::Var c_prev) {
  Tape::Var z = t.affine(t.concat2(x, h_prev), w, &b);
  Tape::Var i = t.sigmoid(t.slice(z, 0, hidden));
  Tape::Var f = t.sigmoid(t.slice(z, hidden, hidden));
  Tape::Var g = t.tanh_(t.slice(z, 2 * hidden, hidden));
  Tape::Var o = t.sigmoid(t.slice(z, 3 * hidden, hidden));
  Tape::Var c = t.add(t.mul(f, c_prev), t.mul(i, g));
  Tape::Var h = t.mul(o, t.tanh_(c));
  return {h, c};
}

void LstmLayer::collect(std::vector<Parameter*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

BiLstmEncoder::BiLstmEncoder(const std::string& name, std::size_t in, std::size_t h,
                             std::size_t layers)
    : in_dim(in), hidden(h), depth(layers) {
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t d = l == 0 ? in : 2 * h;
    fwd.emplace_back(name + ".fwd" + std::to_string(l), d, h);
    bwd.emplace_back(name + ".bwd" + std::to_string(l), d, h);
  }
}

void BiLstmEncoder::init(Rng& rng) {
  for (auto& l : fwd) l.init(rng);
  for (auto& l : bwd) l.init(rng);
}

EncoderOut BiLstmEncoder::encode(Tape& t, const std::vector<Tape::Var>& inputs,
                                 double dropout, Rng& rng, bool training) {
  EncoderOut out;
  std::size_t n = inputs.size();
  std::vector<Tape::Var> layer_in = inputs;
  std::vector<Tape::Var> f_out(n), b_out(n);
  for (std::size_t l = 0; l < depth; ++l) {
    if (l > 0)
      for (auto& v : layer_in) v = t.dropout(v, dropout, rng, training);
    Tape::Var h = t.input(Tensor({hidden}));
    Tape::Var c = t.input(Tensor({hidden}));
    for (std::size_t i = 0; i < n; ++i) {
      std::tie(h, c) = fwd[l].step(t, layer_in[i], h, c);
      f_out[i] = h;
    }
    out.final_h_fwd.push_back(h);
    out.final_c_fwd.push_back(c);
    h = t.input(Tensor({hidden}));
    c = t.input(Tensor({hidden}));
    for (std::size_t i = n; i-- > 0;) {
      std::tie(h, c) = bwd[l].step(t, layer_in[i], h, c);
      b_out[i] = h;
    }
    out.final_h_bwd.push_back(h);
    out.final_c_bwd.push_back(c);
    for (std::size_t i = 0; i < n; ++i) layer_in[i] = t.concat2(f_out[i], b_out[i]);
  }
  out.seq = layer_in;
  return out;
}

void BiLstmEncoder::collect(std::vector<Parameter*>& out) {
  for (auto& l : fwd) l.collect(out);
  for (auto& l : bwd) l.collect(out);
}

HighwayLstmStack::HighwayLstmStack(const std::string& name, std::size_t in,
                                   std::size_t h, std::size_t layers_n)
    : in_proj(name + ".proj", {h, in}), in_dim(in), hidden(h), depth(layers_n) {
  for (std::size_t l = 0; l < layers_n; ++l) {
    layers.emplace_back(name + ".lstm" + std::to_string(l), h, h);
    gate_w.emplace_back(name + ".gate" + std::to_string(l) + ".w",
                        std::vector<std::size_t>{h, h});
    gate_b.emplace_back(name + ".gate" + std::to_string(l) + ".b",
                        std::vector<std::size_t>{h});
  }
}

void HighwayLstmStack::init(Rng& rng) {
  in_proj.init_xavier(rng);
  for (auto& l : layers) l.init(rng);
  for (auto& g : gate_w) g.init_xavier(rng);
  for (auto& g : gate_b) g.value.fill(0.0);
}

std::vector<Tape::Var> HighwayLstmStack::run(Tape& t, const std::vector<Tape::Var>& inputs,
                                             double dropout, Rng& rng, bool training) {
  std::size_t n = inputs.size();
  std::vector<Tape::Var> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = t.affine(inputs[i], in_proj, nullptr);
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<Tape::Var> in = x;
    if (l > 0)
      for (auto& v : in) v = t.dropout(v, dropout, rng, training);
    std::vector<Tape::Var> h_out(n);
    Tape::Var h = t.input(Tensor({hidden}));
    Tape::Var c = t.input(Tensor({hidden}));
    bool forward = l % 2 == 0;
    if (forward) {
      for (std::size_t i = 0; i < n; ++i) {
        std::tie(h, c) = layers[l].step(t, in[i], h, c);
        h_out[i] = h;
      }
    } else {
      for (std::size_t i = n; i-- > 0;) {
        std::tie(h, c) = layers[l].step(t, in[i], h, c);
        h_out[i] = h;
      }
    }
    // Highway mix of the recurrent output with the layer input.
    for (std::size_t i = 0; i < n; ++i) {
      Tape::Var gate = t.sigmoid(t.affine(in[i], gate_w[l], &gate_b[l]));
      x[i] = t.add(t.mul(gate, h_out[i]), t.mul(t.one_minus(gate), in[i]));
    }
  }
  return x;
}

void HighwayLstmStack::collect(std::vector<Parameter*>& out) {
  out.push_back(&in_proj);
  for (std::size_t l = 0; l < depth; ++l) {
    layers[l].collect(out);
    out.push_back(&gate_w[l]);
    out.push_back(&gate_b[l]);
  }
}

}  // namespace elcmp
