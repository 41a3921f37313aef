// Seq2seq utterance completion with additive attention and a copy mechanism:
// a switch probability lambda mixes a generation distribution over the base
// vocabulary with attention-derived copy mass over source positions, giving
// a distribution over the per-example extended vocabulary.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elcmp/corpus.hpp"
#include "elcmp/nn.hpp"
#include "elcmp/optim.hpp"
#include "elcmp/tape.hpp"

namespace elcmp {

enum class MixtureMode { additive, softmax_concat };

struct CompletionConfig {
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;
  std::size_t enc_layers = 2;
  std::size_t dec_layers = 2;
  std::size_t attn_dim = 64;
  double dropout = 0.3;
  MixtureMode mixture = MixtureMode::additive;
  bool use_copy = true;
  std::size_t history_depth = 1;
  std::size_t max_decode_len = 24;
};

// Copy/generation mixture (the final per-step word distribution).
// copy_ext_ids maps each source position to its extended-vocab id.
// Throws if p_gen or att are not distributions (tolerance 1e-6).
Tape::Var mixture(Tape& t, Tape::Var lambda, Tape::Var p_gen, Tape::Var att,
                  const std::vector<int>& copy_ext_ids, std::size_t ext_size,
                  MixtureMode mode);

struct DecoderState {
  std::vector<Tape::Var> h, c;  // one per decoder layer
  Tape::Var ctx = -1;           // previous attention context (input feeding)
};

struct DecoderStepOutput {
  Tape::Var lambda;  // scalar in (0,1)
  Tape::Var p_gen;   // distribution over the base vocab
  Tape::Var att;     // attention weights over source positions
  Tape::Var p;       // distribution over the extended vocab
  DecoderState state;
};

struct BeamHypothesis {
  std::vector<int> tokens;  // extended-vocab ids; ends with EOS when finished
  std::vector<double> posteriors;  // P(token) at each step, parallel to tokens
  double score = 0.0;              // sum of log posteriors
  bool finished = false;

  double normalized_score() const {
    return tokens.empty() ? 0.0 : score / static_cast<double>(tokens.size());
  }
};

struct DecodeResult {
  std::vector<std::string> tokens;  // surface strings, EOS stripped
  std::vector<double> posteriors;
  std::vector<double> lambdas;
};

class CompletionModel {
 public:
  CompletionModel(CompletionConfig cfg, Vocabulary vocab, uint64_t seed);

  struct EncodedInput {
    std::vector<Tape::Var> keys;      // encoder outputs, one per source position
    std::vector<Tape::Var> wh;        // cached attention key projections
    DecoderState state;               // bridged initial decoder state
  };

  EncodedInput encode(Tape& t, const std::vector<int>& ids, bool training, Rng& rng);
  DecoderStepOutput decode_step(Tape& t, int prev_ext_id, const DecoderState& state,
                                const EncodedInput& enc,
                                const std::vector<int>& copy_ext_ids,
                                std::size_t ext_size, bool training, Rng& rng);

  // Teacher-forced mean per-token NLL of the reference; backpropagates when
  // `with_grad` and leaves gradients accumulated in the parameters.
  double example_loss(const CompletionExample& ex, bool with_grad, Rng& rng,
                      bool training = true);

  DecodeResult greedy_decode(const std::vector<DialogTurn>& context,
                             const std::vector<std::string>& source,
                             std::size_t max_len);
  std::vector<BeamHypothesis> beam_decode(const std::vector<DialogTurn>& context,
                                          const std::vector<std::string>& source,
                                          std::size_t beam_k, std::size_t max_len);
  // Surface strings of a decoded hypothesis (EOS stripped).
  std::vector<std::string> surface(const BeamHypothesis& hyp,
                                   const ExtendedVocab& ext) const;
  EncodedSource encode_example(const CompletionExample& ex) const {
    return encode_source(ex, cfg_.history_depth, vocab_);
  }

  std::vector<Parameter*> params();
  const Vocabulary& vocab() const { return vocab_; }
  const CompletionConfig& config() const { return cfg_; }
  std::size_t unk_reference_tokens() const { return unk_reference_tokens_; }

 private:
  CompletionConfig cfg_;
  Vocabulary vocab_;

  Parameter embed_;                    // shared encoder/decoder embedding
  BiLstmEncoder encoder_;
  std::vector<LstmLayer> decoder_;
  std::vector<Parameter> bridge_h_w_, bridge_h_b_, bridge_c_w_, bridge_c_b_;
  Parameter att_ws_, att_wh_, att_v_;  // score = v . tanh(Ws s + Wh h_i)
  Parameter gen_w_, gen_b_;            // generation head over [h*, s]
  Parameter lam_w_, lam_b_;            // copy switch over [h*, x, s]

  std::size_t unk_reference_tokens_ = 0;

  Tape::Var embed_token(Tape& t, int ext_id);
};

struct CompletionTrainReport {
  std::vector<double> epoch_mean_nll;
  std::size_t unk_reference_tokens = 0;
  std::size_t steps = 0;
};

// Epoch-driven training; the optional callback runs after each epoch and may
// stop training early (checkpoint-quality early stopping stays outside).
CompletionTrainReport train_completion(
    CompletionModel& model, const CompletionCorpus& corpus,
    const std::vector<std::size_t>& train_idx, const OptimizerConfig& opt,
    std::size_t epochs, uint64_t seed,
    const std::function<bool(std::size_t, double)>& after_epoch = {});

}  // namespace elcmp
