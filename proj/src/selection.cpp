#include "elcmp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace elcmp {

SelectionMethod selection_method_from_name(const std::string& name) {
  if (name == "logits_sum" || name == "add_logits") return SelectionMethod::logits_sum;
  if (name == "logits_max" || name == "max_logits") return SelectionMethod::logits_max;
  if (name == "hidden_sum" || name == "add_hidden") return SelectionMethod::hidden_sum;
  if (name == "hidden_max" || name == "max_hidden") return SelectionMethod::hidden_max;
  if (name == "hidden_cat" || name == "concat_hidden") return SelectionMethod::hidden_cat;
  throw CorpusError("unknown selection method: " + name);
}

const char* selection_method_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::logits_sum: return "logits_sum";
    case SelectionMethod::logits_max: return "logits_max";
    case SelectionMethod::hidden_sum: return "hidden_sum";
    case SelectionMethod::hidden_max: return "hidden_max";
    case SelectionMethod::hidden_cat: return "hidden_cat";
  }
  return "?";
}

bool is_hidden_method(SelectionMethod m) {
  return m == SelectionMethod::hidden_sum || m == SelectionMethod::hidden_max ||
         m == SelectionMethod::hidden_cat;
}

SelectionConfig default_selection_config(const LabelInventory& acts) {
  SelectionConfig cfg;
  for (const char* name : {"hold", "complaint", "nonsense", "apology", "incomplete"})
    cfg.l_da_non.push_back(acts.id(name));
  std::sort(cfg.l_da_non.begin(), cfg.l_da_non.end());
  return cfg;
}

SelectionConfig load_selection_config(const std::string& path,
                                      const LabelInventory& acts) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open selection config: " + path);
  SelectionConfig cfg;
  cfg.l_da_non.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CorpusError("selection config line " + std::to_string(line_no) +
                        " missing '='");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "method") {
      cfg.method = selection_method_from_name(value);
    } else if (key == "tau") {
      cfg.tau = std::stod(value);
    } else if (key == "theta") {
      cfg.theta = std::stod(value);
    } else if (key == "expert") {
      cfg.expert_enabled = value == "on" || value == "true" || value == "1";
    } else if (key == "l_da_non") {
      std::istringstream names(value);
      std::string name;
      while (std::getline(names, name, ',')) {
        if (!name.empty()) cfg.l_da_non.push_back(acts.id(name));
      }
    } else {
      throw CorpusError("selection config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  std::sort(cfg.l_da_non.begin(), cfg.l_da_non.end());
  return cfg;
}

void save_selection_config(const std::string& path, const SelectionConfig& cfg,
                           const LabelInventory& acts) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CorpusError("cannot write selection config: " + path);
  os << "method=" << selection_method_name(cfg.method) << "\n";
  os << "tau=" << cfg.tau << "\n";
  os << "theta=" << cfg.theta << "\n";
  os << "expert=" << (cfg.expert_enabled ? "on" : "off") << "\n";
  os << "l_da_non=";
  for (std::size_t i = 0; i < cfg.l_da_non.size(); ++i)
    os << (i ? "," : "") << acts.name(cfg.l_da_non[i]);
  os << "\n";
}

Tensor combine_logits(const Tensor& d_e, const Tensor& d_c, SelectionMethod method) {
  if (d_e.size() != d_c.size())
    throw ShapeError("combine_logits: length mismatch (" + std::to_string(d_e.size()) +
                     " vs " + std::to_string(d_c.size()) + ")");
  Tensor out(d_e.dims);
  if (method == SelectionMethod::logits_sum) {
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = d_e.v[i] + d_c.v[i];
  } else if (method == SelectionMethod::logits_max) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out.v[i] = std::max(d_e.v[i], d_c.v[i]);
  } else {
    throw ShapeError("combine_logits: not a logits method");
  }
  return out;
}

Tensor combine_hidden(const Tensor& h_e, const Tensor& h_c, SelectionMethod method,
                      const CombinedHead& head) {
  if (h_e.size() != h_c.size()) throw ShapeError("combine_hidden: dim mismatch");
  Tensor h;
  switch (method) {
    case SelectionMethod::hidden_sum:
      h = Tensor(h_e.dims);
      for (std::size_t i = 0; i < h.size(); ++i) h.v[i] = h_e.v[i] + h_c.v[i];
      break;
    case SelectionMethod::hidden_max:
      h = Tensor(h_e.dims);
      for (std::size_t i = 0; i < h.size(); ++i)
        h.v[i] = std::max(h_e.v[i], h_c.v[i]);
      break;
    case SelectionMethod::hidden_cat:
      h = Tensor({h_e.size() + h_c.size()});
      std::copy(h_e.v.begin(), h_e.v.end(), h.v.begin());
      std::copy(h_c.v.begin(), h_c.v.end(), h.v.begin() + h_e.size());
      break;
    default:
      throw ShapeError("combine_hidden: not a hidden method");
  }
  if (head.w.value.cols() != h.size())
    throw ShapeError("combine_hidden: head expects width " +
                     std::to_string(head.w.value.cols()) + ", got " +
                     std::to_string(h.size()));
  Tensor d({head.w.value.rows()});
  for (std::size_t l = 0; l < d.size(); ++l) {
    double z = head.b.value.v[l];
    for (std::size_t j = 0; j < h.size(); ++j)
      z += head.w.value.at(l, j) * h.v[j];
    d.v[l] = 1.0 / (1.0 + std::exp(-z));
  }
  return d;
}

std::vector<int> da_select(const Prediction& pred_e, const Prediction& pred_c,
                           const SelectionConfig& cfg, const CombinedHead* head) {
  if (cfg.expert_enabled) {
    std::vector<int> decided = da_decide(pred_e.D, cfg.theta);
    for (int l : decided)
      if (std::binary_search(cfg.l_da_non.begin(), cfg.l_da_non.end(), l))
        return decided;
  }
  if (is_hidden_method(cfg.method)) {
    if (!head) throw ShapeError("da_select: hidden method requires a combined head");
    return da_decide(combine_hidden(pred_e.H, pred_c.H, cfg.method, *head), cfg.theta);
  }
  Tensor d = combine_logits(pred_e.D, pred_c.D, cfg.method);
  double theta = cfg.method == SelectionMethod::logits_sum ? 2.0 * cfg.theta : cfg.theta;
  return da_decide(d, theta);
}

std::vector<int> align(const std::vector<std::string>& original,
                       const std::vector<std::string>& completed) {
  std::size_t n = original.size(), m = completed.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      dp[i][j] = original[i - 1] == completed[j - 1]
                     ? dp[i - 1][j - 1] + 1
                     : std::max(dp[i - 1][j], dp[i][j - 1]);
  std::vector<int> map(n, -1);
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (original[i - 1] == completed[j - 1] && dp[i][j] == dp[i - 1][j - 1] + 1) {
      map[i - 1] = static_cast<int>(j - 1);
      --i;
      --j;
    } else if (dp[i - 1][j] >= dp[i][j - 1]) {
      --i;
    } else {
      --j;
    }
  }
  return map;
}

namespace {

// Original-coordinate image of a completed-coordinate span; nullopt when the
// span lies wholly in completed-only material.
std::optional<std::pair<std::size_t, std::size_t>> project_span(
    std::size_t s, std::size_t e, const std::vector<int>& alignment) {
  std::size_t lo = 0, hi = 0;
  bool any = false;
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (alignment[i] < 0) continue;
    std::size_t j = static_cast<std::size_t>(alignment[i]);
    if (j < s || j > e) continue;
    if (!any) {
      lo = hi = i;
      any = true;
    } else {
      hi = i;
    }
  }
  if (!any) return std::nullopt;
  return std::make_pair(lo, hi);
}

bool spans_overlap(std::size_t a1, std::size_t a2, std::size_t b1, std::size_t b2) {
  return a1 <= b2 && b1 <= a2;
}

}  // namespace

std::vector<SrlFrame> project_frames(const std::vector<SrlFrame>& frames_completed,
                                     const std::vector<int>& alignment) {
  std::vector<SrlFrame> out;
  for (const auto& fr : frames_completed) {
    SrlFrame proj;
    if (fr.predicate_span) {
      auto p = project_span(fr.predicate_span->first, fr.predicate_span->second,
                            alignment);
      if (p) {
        proj.predicate_source = PredicateSource::in_utterance;
        proj.predicate_span = p;
      } else {
        proj.predicate_source = PredicateSource::in_context;
      }
    } else {
      proj.predicate_source = fr.predicate_source;
    }
    for (const auto& arg : fr.args) {
      auto p = project_span(arg.start, arg.end, alignment);
      if (p)
        proj.args.push_back({arg.role, p->first, p->second, false});
      else
        proj.args.push_back({arg.role, arg.start, arg.end, true});
    }
    out.push_back(std::move(proj));
  }
  return out;
}

std::vector<SrlFrame> srl_select_rule(const std::vector<SrlFrame>& frames_e,
                                      const std::vector<SrlFrame>& frames_c,
                                      const std::vector<int>& alignment) {
  if (has_predicate(frames_e)) return frames_e;
  return project_frames(frames_c, alignment);
}

std::vector<SrlFrame> srl_select_probability(const std::vector<SrlFrame>& frames_e,
                                             const std::vector<SrlFrame>& frames_c,
                                             const BeamHypothesis& beam,
                                             const std::vector<int>& alignment,
                                             double tau) {
  if (!has_predicate(frames_e)) return project_frames(frames_c, alignment);

  std::size_t covered = beam.tokens.size();
  if (covered > 0 && beam.tokens.back() == Vocabulary::kEos) --covered;
  if (beam.posteriors.size() != beam.tokens.size())
    throw ShapeError("srl_select_probability: posterior/token length mismatch");

  // Split completed-path arguments by per-token decode confidence.
  std::vector<SrlFrame> kept = frames_c;
  std::vector<SrlArgSpan> rejected;
  std::size_t n_kept = 0;
  for (auto& fr : kept) {
    std::vector<SrlArgSpan> keep_args;
    for (const auto& arg : fr.args) {
      if (arg.end >= covered)
        throw ShapeError("srl_select_probability: argument span exceeds beam coverage");
      double conf = 1.0;
      for (std::size_t i = arg.start; i <= arg.end; ++i)
        conf = std::min(conf, beam.posteriors[i]);
      if (conf >= tau) {
        keep_args.push_back(arg);
        ++n_kept;
      } else {
        rejected.push_back(arg);
      }
    }
    fr.args = std::move(keep_args);
  }
  // No rejection means the completed path is trusted throughout. This covers
  // the vacuous case of an argument-free completed prediction: with no token
  // under the threshold the completion is never flagged.
  if (rejected.empty()) return project_frames(frames_c, alignment);
  if (n_kept == 0) return frames_e;

  // Mixed case: confidently completed arguments, plus the original-path
  // prediction for the regions the completion got wrong.
  std::vector<std::pair<std::size_t, std::size_t>> bad_regions;
  for (const auto& arg : rejected) {
    auto p = project_span(arg.start, arg.end, alignment);
    if (p) bad_regions.push_back(*p);
  }
  std::vector<SrlFrame> out;
  for (const auto& fr : frames_e) {
    SrlFrame keep = fr;
    keep.args.clear();
    for (const auto& arg : fr.args)
      for (const auto& [s, e] : bad_regions)
        if (spans_overlap(arg.start, arg.end, s, e)) {
          keep.args.push_back(arg);
          break;
        }
    if (!keep.args.empty() || has_predicate({fr})) out.push_back(std::move(keep));
  }
  std::vector<SrlFrame> proj = project_frames(kept, alignment);
  for (auto& fr : proj)
    if (!fr.args.empty()) out.push_back(std::move(fr));
  return out;
}

}  // namespace elcmp
