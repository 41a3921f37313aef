// Metrics for the three tasks. All values live in [0, 1]; F1 is the harmonic
// mean of precision and recall, 0 when both are 0.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elcmp/understanding.hpp"

namespace elcmp {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf_from_counts(double tp, double pred_total, double gold_total);

// Corpus BLEU: geometric mean of clipped n-gram precisions (n <= max_n) with
// brevity penalty; add-one smoothing on the n >= 2 counts.
double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::string>>& references,
            std::size_t max_n = 4);

double exact_match(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::string>>& references);

// Micro token-multiset precision/recall/F1 with clipped counts (the paper's
// "one word" PRF read as token-multiset overlap).
Prf word_prf(const std::vector<std::vector<std::string>>& hypotheses,
             const std::vector<std::vector<std::string>>& references);

// Micro-averaged multi-label PRF over label instances.
Prf multilabel_prf(const std::vector<std::vector<int>>& predicted,
                   const std::vector<std::vector<int>>& gold);
// Macro variant (averaged over labels appearing in gold or predictions).
Prf multilabel_prf_macro(const std::vector<std::vector<int>>& predicted,
                         const std::vector<std::vector<int>>& gold,
                         std::size_t n_labels);

enum class SrlScoringMode { standard, modified };

// Span-based SRL PRF. A span counts iff role and token span both match.
// Predicate spans are not scored. In modified mode (a) an empty prediction
// against nonempty gold counts its gold spans as false negatives instead of
// skipping the example, and (b) context_side prediction spans (wholly in
// completed-only material) are dropped from both numerator and denominator.
Prf srl_span_prf(const std::vector<std::vector<SrlFrame>>& predicted,
                 const std::vector<std::vector<SrlFrame>>& gold,
                 SrlScoringMode mode);

}  // namespace elcmp
