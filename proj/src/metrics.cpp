#include "elcmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace elcmp {

Prf prf_from_counts(double tp, double pred_total, double gold_total) {
  Prf out;
  out.precision = pred_total > 0 ? tp / pred_total : 0.0;
  out.recall = gold_total > 0 ? tp / gold_total : 0.0;
  out.f1 = out.precision + out.recall > 0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                          std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

}  // namespace

double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::string>>& references,
            std::size_t max_n) {
  if (hypotheses.empty()) throw std::invalid_argument("bleu: empty hypothesis set");
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("bleu: hypothesis/reference count mismatch");
  for (const auto& r : references)
    if (r.empty()) throw std::invalid_argument("bleu: empty reference");

  std::size_t hyp_len = 0, ref_len = 0;
  std::vector<double> matched(max_n, 0.0), total(max_n, 0.0);
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    hyp_len += hypotheses[k].size();
    ref_len += references[k].size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      auto hyp_counts = ngram_counts(hypotheses[k], n);
      auto ref_counts = ngram_counts(references[k], n);
      for (const auto& [gram, c] : hyp_counts) {
        total[n - 1] += static_cast<double>(c);
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          matched[n - 1] += static_cast<double>(std::min(c, it->second));
      }
    }
  }

  double log_precision = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    double m = matched[n - 1], t = total[n - 1];
    if (n >= 2) {  // add-one smoothing on higher-order counts
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;  // unsmoothed unigram miss
    log_precision += std::log(m / t);
  }
  double bp = hyp_len < ref_len && hyp_len > 0
                  ? std::exp(1.0 - static_cast<double>(ref_len) /
                                       static_cast<double>(hyp_len))
                  : (hyp_len == 0 ? 0.0 : 1.0);
  return bp * std::exp(log_precision / static_cast<double>(max_n));
}

double exact_match(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("exact_match: count mismatch");
  if (hypotheses.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < hypotheses.size(); ++k)
    if (hypotheses[k] == references[k]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(hypotheses.size());
}

Prf word_prf(const std::vector<std::vector<std::string>>& hypotheses,
             const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("word_prf: count mismatch");
  double tp = 0.0, hyp_total = 0.0, ref_total = 0.0;
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    std::map<std::string, std::size_t> h, r;
    for (const auto& t : hypotheses[k]) ++h[t];
    for (const auto& t : references[k]) ++r[t];
    hyp_total += static_cast<double>(hypotheses[k].size());
    ref_total += static_cast<double>(references[k].size());
    for (const auto& [tok, c] : h) {
      auto it = r.find(tok);
      if (it != r.end()) tp += static_cast<double>(std::min(c, it->second));
    }
  }
  return prf_from_counts(tp, hyp_total, ref_total);
}

Prf multilabel_prf(const std::vector<std::vector<int>>& predicted,
                   const std::vector<std::vector<int>>& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("multilabel_prf: count mismatch");
  double tp = 0.0, pred_total = 0.0, gold_total = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    std::set<int> p(predicted[k].begin(), predicted[k].end());
    std::set<int> g(gold[k].begin(), gold[k].end());
    pred_total += static_cast<double>(p.size());
    gold_total += static_cast<double>(g.size());
    for (int l : p)
      if (g.count(l)) tp += 1.0;
  }
  return prf_from_counts(tp, pred_total, gold_total);
}

Prf multilabel_prf_macro(const std::vector<std::vector<int>>& predicted,
                         const std::vector<std::vector<int>>& gold,
                         std::size_t n_labels) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("multilabel_prf_macro: count mismatch");
  Prf sum;
  std::size_t active = 0;
  for (std::size_t l = 0; l < n_labels; ++l) {
    double tp = 0.0, pred_total = 0.0, gold_total = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      bool in_p = std::find(predicted[k].begin(), predicted[k].end(),
                            static_cast<int>(l)) != predicted[k].end();
      bool in_g = std::find(gold[k].begin(), gold[k].end(), static_cast<int>(l)) !=
                  gold[k].end();
      pred_total += in_p;
      gold_total += in_g;
      tp += in_p && in_g;
    }
    if (pred_total == 0.0 && gold_total == 0.0) continue;
    Prf p = prf_from_counts(tp, pred_total, gold_total);
    sum.precision += p.precision;
    sum.recall += p.recall;
    sum.f1 += p.f1;
    ++active;
  }
  if (active == 0) return {};
  sum.precision /= static_cast<double>(active);
  sum.recall /= static_cast<double>(active);
  sum.f1 /= static_cast<double>(active);
  return sum;
}

namespace {

using Span = std::tuple<std::string, std::size_t, std::size_t>;

std::map<Span, std::size_t> arg_multiset(const std::vector<SrlFrame>& frames,
                                         bool drop_context_side) {
  std::map<Span, std::size_t> out;
  for (const auto& fr : frames)
    for (const auto& a : fr.args) {
      if (drop_context_side && a.context_side) continue;
      ++out[{a.role, a.start, a.end}];
    }
  return out;
}

}  // namespace

Prf srl_span_prf(const std::vector<std::vector<SrlFrame>>& predicted,
                 const std::vector<std::vector<SrlFrame>>& gold,
                 SrlScoringMode mode) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("srl_span_prf: count mismatch");
  double tp = 0.0, pred_total = 0.0, gold_total = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    auto p = arg_multiset(predicted[k], mode == SrlScoringMode::modified);
    auto g = arg_multiset(gold[k], false);
    if (mode == SrlScoringMode::standard && p.empty() && !g.empty())
      continue;  // the original scheme ignores empty outputs
    for (const auto& [span, c] : p) pred_total += static_cast<double>(c);
    for (const auto& [span, c] : g) gold_total += static_cast<double>(c);
    for (const auto& [span, c] : p) {
      auto it = g.find(span);
      if (it != g.end()) tp += static_cast<double>(std::min(c, it->second));
    }
  }
  return prf_from_counts(tp, pred_total, gold_total);
}

}  // namespace elcmp
