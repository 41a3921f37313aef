// The hybrid layer: logits- and hidden-states-based combination of the two
// prediction paths, the dialog-act expert short-circuit, the two SRL expert
// selectors, and token alignment between original and completed utterances.
#pragma once

#include <string>
#include <vector>

#include "elcmp/completion.hpp"
#include "elcmp/understanding.hpp"

namespace elcmp {

enum class SelectionMethod {
  logits_sum,
  logits_max,
  hidden_sum,
  hidden_max,
  hidden_cat,
};

SelectionMethod selection_method_from_name(const std::string& name);
const char* selection_method_name(SelectionMethod m);
bool is_hidden_method(SelectionMethod m);

struct SelectionConfig {
  SelectionMethod method = SelectionMethod::logits_sum;
  std::vector<int> l_da_non;  // act ids never trusted from completed text
  double tau = 0.5;           // beam-posterior threshold
  double theta = 0.5;         // per-label decision threshold
  bool expert_enabled = true;
};

// Text config: method=..., tau=..., theta=..., expert=on|off,
// l_da_non=<comma-separated label names>.
SelectionConfig load_selection_config(const std::string& path,
                                      const LabelInventory& acts);
void save_selection_config(const std::string& path, const SelectionConfig& cfg,
                           const LabelInventory& acts);
SelectionConfig default_selection_config(const LabelInventory& acts);

// Elementwise sum or max of the two per-label score vectors.
Tensor combine_logits(const Tensor& d_e, const Tensor& d_c, SelectionMethod method);

struct CombinedHead {
  Parameter w, b;
  CombinedHead() = default;
  CombinedHead(const std::string& name, std::size_t n_labels, std::size_t in_dim)
      : w(name + ".w", {n_labels, in_dim}), b(name + ".b", {n_labels}) {}
};

// D = sigmoid(W*H + b) where H is the per-method combination of the two
// pooled representations.
Tensor combine_hidden(const Tensor& h_e, const Tensor& h_c, SelectionMethod method,
                      const CombinedHead& head);

// Full dialog-act selection. The expert rule fires only at test time: when
// the original-utterance path decides a label in l_da_non, its prediction is
// returned untouched. `head` is required for hidden methods.
std::vector<int> da_select(const Prediction& pred_e, const Prediction& pred_c,
                           const SelectionConfig& cfg,
                           const CombinedHead* head = nullptr);

// Longest-common-subsequence token alignment, original -> completed index
// (-1 where an original token has no match). When several maximal matchings
// exist the matches are packed toward the end of the completed sequence,
// keeping original tokens attached to their embedded occurrence.
std::vector<int> align(const std::vector<std::string>& original,
                       const std::vector<std::string>& completed);

// Maps completed-coordinate frames onto original coordinates. Argument and
// predicate spans falling wholly in completed-only material keep their
// completed coordinates and are flagged context_side.
std::vector<SrlFrame> project_frames(const std::vector<SrlFrame>& frames_completed,
                                     const std::vector<int>& alignment);

// Rule-based expert: original frames when the original utterance has a
// predicate, otherwise the completed-path frames projected onto the original.
std::vector<SrlFrame> srl_select_rule(const std::vector<SrlFrame>& frames_e,
                                      const std::vector<SrlFrame>& frames_c,
                                      const std::vector<int>& alignment);

// Probability-based expert: per completed-path argument, keep it iff the
// minimum beam posterior over its tokens reaches tau, otherwise fall back to
// the original-path prediction for that region. tau=0 reproduces the pure
// completed-path choice, tau>1 reproduces srl_select_rule.
std::vector<SrlFrame> srl_select_probability(const std::vector<SrlFrame>& frames_e,
                                             const std::vector<SrlFrame>& frames_c,
                                             const BeamHypothesis& beam,
                                             const std::vector<int>& alignment,
                                             double tau);

}  // namespace elcmp
