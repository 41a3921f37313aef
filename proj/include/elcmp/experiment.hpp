// Experiment plumbing: run configuration with provenance, corpus hashing,
// the jointly trained hidden-state hybrid model, and the baseline-grid
// runners (EL / CMP / Hybrid-EL-EL / Hybrid-CMP-CMP / Hybrid-EL-CMP).
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "elcmp/completion.hpp"
#include "elcmp/metrics.hpp"
#include "elcmp/selection.hpp"
#include "elcmp/synthetic.hpp"
#include "elcmp/understanding.hpp"

namespace elcmp {

// ---------------------------------------------------------------- hashing

std::string sha1_hex(const std::string& bytes);
// Git-style blob hash of a file's contents.
std::string git_blob_sha1_file(const std::string& path);

// ---------------------------------------------------------------- config

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value run configuration. Unknown keys are rejected; the full
// config is serialized into every report.
struct RunConfig {
  uint64_t seed = 1;
  std::string data_dir;
  std::size_t test_count = 250;
  std::size_t kfold_k = 5;

  std::size_t gen_n = 2000;
  SyntheticMix mix;

  CompletionConfig completion;
  std::size_t completion_min_count = 4;
  OptimizerConfig completion_opt{"sgd", 1.0, 5.0, 0.8};
  std::size_t completion_epochs = 16;
  std::size_t beam_k = 4;

  DAConfig da;
  OptimizerConfig da_opt{"adam", 1e-3, 5.0, 1.0};
  std::size_t da_epochs = 5;

  SRLTaggerConfig srl;
  OptimizerConfig srl_opt{"adam", 1e-3, 5.0, 1.0};
  std::size_t srl_epochs = 4;

  std::string selection_method = "logits_sum";
  double selection_tau = 0.5;
  double selection_theta = 0.5;
  bool selection_expert = true;
  std::vector<std::string> l_da_non_names = {"hold", "complaint", "nonsense",
                                             "apology", "incomplete"};

  static RunConfig load(const std::string& path);
  void set(const std::string& key, const std::string& value);
  nlohmann::json to_json() const;
  SelectionConfig selection(const LabelInventory& acts) const;
};

// ---------------------------------------------------------------- joint model

// Two utterance encoders trained jointly with a combined head through
// D = sigmoid(W*H + b); used by the hidden-state selection methods.
class HybridHiddenModel {
 public:
  HybridHiddenModel(const DAConfig& cfg, Vocabulary vocab, std::size_t n_labels,
                    SelectionMethod method, uint64_t seed);

  TrainReport train(const DACorpus& original, const DACorpus& completed,
                    const std::vector<std::size_t>& train_idx,
                    const OptimizerConfig& opt, std::size_t epochs, uint64_t seed);

  // Pooled representations of the two paths (eval mode).
  std::pair<Tensor, Tensor> pooled(const std::vector<std::string>& utt_e,
                                   const std::vector<std::string>& utt_c);

  SelectionMethod method() const { return method_; }
  const CombinedHead& head() const { return head_; }
  DAClassifier& encoder_e() { return enc_e_; }
  DAClassifier& encoder_c() { return enc_c_; }
  std::vector<Parameter*> params();

 private:
  SelectionMethod method_;
  DAClassifier enc_e_, enc_c_;
  CombinedHead head_;
};

// ---------------------------------------------------------------- pipelines

struct CompletionEval {
  double bleu = 0.0;
  double em = 0.0;
  Prf word;
};

// Greedy-decodes the given examples and scores them against the references.
CompletionEval evaluate_completion(CompletionModel& model,
                                   const CompletionCorpus& corpus,
                                   const std::vector<std::size_t>& idx);

// Trains until the held-out exact match reaches `target_em`, the epoch cap,
// or the wall-clock budget, whichever comes first. em_history records the
// held-out EM after every epoch.
struct CompletionRun {
  CompletionTrainReport train;
  std::vector<double> em_history;
  double final_em = 0.0;
};
CompletionRun train_completion_until(CompletionModel& model,
                                     const CompletionCorpus& corpus,
                                     const std::vector<std::size_t>& train_idx,
                                     const std::vector<std::size_t>& eval_idx,
                                     const OptimizerConfig& opt,
                                     std::size_t max_epochs, uint64_t seed,
                                     double target_em, double budget_seconds);

// Cached automatic completions for a test set (top beam hypothesis).
struct AutoCompletion {
  std::vector<std::string> tokens;
  std::vector<double> posteriors;  // per completed token
};
std::vector<AutoCompletion> auto_complete(CompletionModel& model,
                                          const CompletionCorpus& corpus,
                                          const std::vector<std::size_t>& idx,
                                          std::size_t beam_k);

struct DAModels {
  std::unique_ptr<DAClassifier> el_a, el_b, cmp_a, cmp_b;
  std::unique_ptr<HybridHiddenModel> hidden_sum, hidden_max, hidden_cat;
  Vocabulary vocab;
};

// Trains all dialog-act members: two EL seeds, two CMP seeds, and the three
// jointly trained hidden-method models.
DAModels train_da_models(const DACorpus& original, const DACorpus& completed,
                         const std::vector<std::size_t>& train_idx,
                         const LabelInventory& acts, const DAConfig& cfg,
                         const OptimizerConfig& opt, std::size_t epochs,
                         uint64_t seed, bool with_hidden = true);

struct SrlModels {
  std::unique_ptr<SRLTagger> predid_el, arg_el, predid_cmp, arg_cmp;
};

SrlModels train_srl_models(const SRLCorpus& original, const SRLCorpus& completed,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::string>& roles,
                           const SRLTaggerConfig& cfg, const OptimizerConfig& opt,
                           std::size_t epochs, uint64_t seed);

enum class GridVariant { el, cmp, hybrid_el_el, hybrid_cmp_cmp, hybrid_el_cmp };
GridVariant grid_variant_from_name(const std::string& name);
const char* grid_variant_name(GridVariant v);  // exact paper spelling

struct VariantResult {
  std::string variant;
  std::string selection;
  Prf micro;
  Prf macro;
  std::size_t expert_short_circuits = 0;
  std::size_t n_examples = 0;
  nlohmann::json per_example = nlohmann::json::array();
};

VariantResult run_da_variant(GridVariant variant, const SelectionConfig& sel,
                             DAModels& models, const DACorpus& original,
                             const std::vector<AutoCompletion>& completions,
                             const std::vector<std::size_t>& test_idx,
                             const LabelInventory& acts);

// SRL grid: selection is rule-based (tau ignored) or probability-based.
enum class SrlSelector { rule, probability };
VariantResult run_srl_variant(GridVariant variant, SrlSelector selector, double tau,
                              SrlModels& models, const SRLCorpus& original,
                              const std::vector<AutoCompletion>& completions,
                              const std::vector<std::size_t>& test_idx);

// Validation sweep for the beam-posterior threshold: evaluates the
// probability selector at each candidate on the validation fold and returns
// the best (earlier candidates win ties, so list the default first).
double sweep_tau(SrlModels& models, const SRLCorpus& original,
                 const std::vector<AutoCompletion>& completions_val,
                 const std::vector<std::size_t>& val_idx,
                 std::span<const double> candidates);

// Report assembly: config + corpus hashes + metrics, written as JSON.
nlohmann::json make_report(const RunConfig& cfg, const std::string& task,
                           const VariantResult& result,
                           const std::vector<std::pair<std::string, std::string>>&
                               corpus_hashes);
void write_report(const std::string& path, const nlohmann::json& report);

}  // namespace elcmp
