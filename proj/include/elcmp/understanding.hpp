// The two encoder-classifier paths: a multi-label dialog-act classifier over
// pooled biLSTM states and a BIO semantic-role tagger (stacked
// alternating-direction LSTMs with highway gates) with constrained decoding.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elcmp/corpus.hpp"
#include "elcmp/nn.hpp"
#include "elcmp/optim.hpp"

namespace elcmp {

// ---------------------------------------------------------------- dialog acts

struct Prediction {
  Tensor D;  // per-label probabilities
  Tensor H;  // pooled hidden representation
};

struct DAConfig {
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;
  std::size_t layers = 2;
  double dropout = 0.3;
  double theta = 0.5;
};

class DAClassifier {
 public:
  DAClassifier(DAConfig cfg, Vocabulary vocab, std::size_t n_labels, uint64_t seed,
               const std::string& name = "da");

  // Logits and pooled representation; the encoder reads the utterance alone
  // (context reaches this path only through completion).
  std::pair<Tape::Var, Tape::Var> forward(Tape& t, const std::vector<int>& ids,
                                          bool training, Rng& rng);
  Prediction predict(const std::vector<DialogTurn>& context,
                     const std::vector<std::string>& utterance);

  std::vector<Parameter*> params();
  const Vocabulary& vocab() const { return vocab_; }
  const DAConfig& config() const { return cfg_; }
  std::size_t n_labels() const { return n_labels_; }

 private:
  DAConfig cfg_;
  Vocabulary vocab_;
  std::size_t n_labels_;
  Parameter embed_;
  BiLstmEncoder enc_;
  Parameter out_w_, out_b_;
};

// Threshold decision with argmax fallback (lowest id wins ties).
std::vector<int> da_decide(const Tensor& D, double theta);

struct TrainReport {
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
};

TrainReport da_train(DAClassifier& clf, const DACorpus& corpus,
                     const std::vector<std::size_t>& train_idx,
                     const OptimizerConfig& opt, std::size_t epochs, uint64_t seed);

// ---------------------------------------------------------------- SRL

struct SrlArgSpan {
  std::string role;
  std::size_t start = 0, end = 0;  // inclusive token span
  bool context_side = false;       // projected wholly into completed-only material

  bool operator==(const SrlArgSpan&) const = default;
};

struct SrlFrame {
  PredicateSource predicate_source = PredicateSource::in_utterance;
  std::optional<std::pair<std::size_t, std::size_t>> predicate_span;
  std::vector<SrlArgSpan> args;
};

// BIO tag set over a role inventory; id 0 is "O", then B-X/I-X pairs.
struct TagSet {
  std::vector<std::string> names;

  static TagSet for_roles(const std::vector<std::string>& roles);
  int id(const std::string& name) const;
  std::size_t size() const { return names.size(); }
  bool valid_start(int tag) const;
  bool valid_transition(int prev, int next) const;
};

struct SRLTaggerConfig {
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;
  std::size_t layers = 4;
  double dropout = 0.3;
};

class SRLTagger {
 public:
  SRLTagger(SRLTaggerConfig cfg, Vocabulary vocab, TagSet tags, uint64_t seed,
            const std::string& name = "srl");

  // Per-token tag logits. `predicate_span` empty means the predicate lives in
  // context; the indicator feature is then all-zero.
  std::vector<Tape::Var> forward(
      Tape& t, const std::vector<int>& ids,
      const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span,
      bool training, Rng& rng);

  // Softmax-normalized per-token tag distributions (eval mode).
  std::vector<Tensor> emissions(
      const std::vector<std::string>& utterance,
      const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span);

  std::vector<Parameter*> params();
  const Vocabulary& vocab() const { return vocab_; }
  const TagSet& tags() const { return tags_; }

 private:
  SRLTaggerConfig cfg_;
  Vocabulary vocab_;
  TagSet tags_;
  Parameter embed_;
  HighwayLstmStack stack_;
  Parameter out_w_, out_b_;
};

// Highest-probability tag path subject to BIO validity; the result always
// passes the validity checker.
std::vector<int> viterbi_bio(const std::vector<Tensor>& emissions, const TagSet& tags);

SrlFrame extract_frame(
    const std::vector<std::string>& tags, PredicateSource source,
    const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span);
bool has_predicate(const std::vector<SrlFrame>& frames);

// Argument-tagger training: one instance per (example, frame). When
// `in_utterance_only` is set, context-predicate frames are skipped (the
// original-utterance path never sees a predicate it cannot locate).
TrainReport srl_train(SRLTagger& tagger, const SRLCorpus& corpus,
                      const std::vector<std::size_t>& train_idx,
                      const OptimizerConfig& opt, std::size_t epochs, uint64_t seed,
                      bool in_utterance_only);

// Predicate identification: a {O, B-V, I-V} tagger pass with no indicator.
TrainReport predicate_train(SRLTagger& tagger, const SRLCorpus& corpus,
                            const std::vector<std::size_t>& train_idx,
                            const OptimizerConfig& opt, std::size_t epochs,
                            uint64_t seed);
std::vector<std::pair<std::size_t, std::size_t>> predict_predicates(
    SRLTagger& predicate_tagger, const std::vector<std::string>& utterance);

// Full tagging pipeline for one utterance: find predicates, tag arguments per
// predicate, decode with the BIO constraint. Empty when no predicate found.
std::vector<SrlFrame> tag_utterance(SRLTagger& predicate_tagger, SRLTagger& arg_tagger,
                                    const std::vector<std::string>& utterance);

}  // namespace elcmp
