#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "elcmp/selection.hpp"
#include "elcmp/synthetic.hpp"

using namespace elcmp;

namespace {

Tensor vec(std::vector<double> v) { return Tensor::vec(std::move(v)); }

Prediction pred_with_d(std::vector<double> d) {
  Prediction p;
  p.D = vec(std::move(d));
  p.H = Tensor({4});
  return p;
}

SelectionConfig cfg_with(SelectionMethod m, std::vector<int> l_non, bool expert,
                         double theta = 0.5, double tau = 0.5) {
  SelectionConfig cfg;
  cfg.method = m;
  cfg.l_da_non = std::move(l_non);
  std::sort(cfg.l_da_non.begin(), cfg.l_da_non.end());
  cfg.expert_enabled = expert;
  cfg.theta = theta;
  cfg.tau = tau;
  return cfg;
}

SrlFrame frame(PredicateSource src,
               std::optional<std::pair<std::size_t, std::size_t>> pred,
               std::vector<SrlArgSpan> args) {
  SrlFrame f;
  f.predicate_source = src;
  f.predicate_span = pred;
  f.args = std::move(args);
  return f;
}

std::multiset<std::tuple<std::string, std::size_t, std::size_t, bool>> arg_set(
    const std::vector<SrlFrame>& frames) {
  std::multiset<std::tuple<std::string, std::size_t, std::size_t, bool>> out;
  for (const auto& f : frames)
    for (const auto& a : f.args) out.insert({a.role, a.start, a.end, a.context_side});
  return out;
}

}  // namespace

TEST_CASE("combine_logits") {
  SUBCASE("sum doubles equal inputs and keeps the argmax") {
    Tensor d = combine_logits(vec({0.2, 0.7}), vec({0.2, 0.7}),
                              SelectionMethod::logits_sum);
    CHECK(d.v[0] == doctest::Approx(0.4));
    CHECK(d.v[1] == doctest::Approx(1.4));
  }
  SUBCASE("elementwise max") {
    Tensor d = combine_logits(vec({0.9, 0.1}), vec({0.2, 0.8}),
                              SelectionMethod::logits_max);
    CHECK(d.v[0] == doctest::Approx(0.9));
    CHECK(d.v[1] == doctest::Approx(0.8));
  }
  SUBCASE("sum is commutative") {
    Tensor a = combine_logits(vec({0.3, 0.5, 0.1}), vec({0.6, 0.2, 0.9}),
                              SelectionMethod::logits_sum);
    Tensor b = combine_logits(vec({0.6, 0.2, 0.9}), vec({0.3, 0.5, 0.1}),
                              SelectionMethod::logits_sum);
    CHECK(a.v == b.v);
  }
  SUBCASE("length mismatch is an error") {
    CHECK_THROWS_AS(combine_logits(vec({0.1}), vec({0.1, 0.2}),
                                   SelectionMethod::logits_sum),
                    ShapeError);
  }
  SUBCASE("sum argmax is invariant under input exchange and positive scaling") {
    Rng rng(77);
    for (int rep = 0; rep < 100; ++rep) {
      Tensor a({6}), b({6});
      for (auto& v : a.v) v = rng.next_double();
      for (auto& v : b.v) v = rng.next_double();
      double scale = 0.1 + 3.0 * rng.next_double();
      auto argmax = [](const Tensor& t) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < t.size(); ++i)
          if (t.v[i] > t.v[best]) best = i;
        return best;
      };
      Tensor ab = combine_logits(a, b, SelectionMethod::logits_sum);
      Tensor ba = combine_logits(b, a, SelectionMethod::logits_sum);
      Tensor scaled_a = a, scaled_b = b;
      for (auto& v : scaled_a.v) v *= scale;
      for (auto& v : scaled_b.v) v *= scale;
      Tensor ss = combine_logits(scaled_a, scaled_b, SelectionMethod::logits_sum);
      CHECK(argmax(ab) == argmax(ba));
      CHECK(argmax(ab) == argmax(ss));
    }
  }
}

TEST_CASE("combine_hidden") {
  CombinedHead head("head", 2, 4);
  head.w.value.fill(0.0);
  head.b.value.fill(0.0);
  Tensor h = vec({0.5, -0.5, 1.0, 0.0});

  SUBCASE("equal inputs: sum doubles, max is identity") {
    Tensor d_sum = combine_hidden(h, h, SelectionMethod::hidden_sum, head);
    Tensor d_max = combine_hidden(h, h, SelectionMethod::hidden_max, head);
    CHECK(d_sum.size() == 2);
    CHECK(d_max.size() == 2);
  }
  SUBCASE("zero head gives D = 0.5 everywhere") {
    Tensor d = combine_hidden(h, h, SelectionMethod::hidden_max, head);
    for (double v : d.v) CHECK(v == doctest::Approx(0.5));
  }
  SUBCASE("cat doubles the input width and mismatched heads throw") {
    CombinedHead wide("wide", 2, 8);
    wide.w.value.fill(0.0);
    Tensor d = combine_hidden(h, h, SelectionMethod::hidden_cat, wide);
    CHECK(d.size() == 2);
    CHECK_THROWS_AS(combine_hidden(h, h, SelectionMethod::hidden_cat, head),
                    ShapeError);
  }
}

TEST_CASE("da_select") {
  SUBCASE("expert short-circuit: hold wins regardless of the completed path") {
    // label 2 = hold-like, in l_da_non
    Prediction pe = pred_with_d({0.1, 0.2, 0.9});
    Prediction pc = pred_with_d({0.99, 0.99, 0.0});
    auto cfg = cfg_with(SelectionMethod::logits_sum, {2}, true);
    CHECK(da_select(pe, pc, cfg) == std::vector<int>{2});
  }
  SUBCASE("expert disabled goes through the combinator") {
    Prediction pe = pred_with_d({0.1, 0.2, 0.9});
    Prediction pc = pred_with_d({0.95, 0.99, 0.0});
    auto cfg = cfg_with(SelectionMethod::logits_sum, {2}, false);
    auto out = da_select(pe, pc, cfg);
    CHECK(out == std::vector<int>{0, 1});  // sums 1.05, 1.19 pass 2*theta
  }
  SUBCASE("combined decision follows the dominating path") {
    // pe picks label 0 (not in l_da_non); pc strongly favors label 1
    Prediction pe = pred_with_d({0.55, 0.45});
    Prediction pc = pred_with_d({0.05, 0.97});
    auto cfg = cfg_with(SelectionMethod::logits_sum, {}, true);
    CHECK(da_select(pe, pc, cfg) == std::vector<int>{1});
  }
  SUBCASE("expert output ignores pred_C entirely when it fires (fuzz)") {
    Prediction pe = pred_with_d({0.2, 0.8, 0.3});
    auto cfg = cfg_with(SelectionMethod::logits_sum, {1}, true);
    auto baseline = da_select(pe, pred_with_d({0.5, 0.5, 0.5}), cfg);
    Rng rng(3);
    for (int rep = 0; rep < 500; ++rep) {
      Prediction pc = pred_with_d({rng.next_double(), rng.next_double(),
                                   rng.next_double()});
      CHECK(da_select(pe, pc, cfg) == baseline);
    }
  }
  SUBCASE("hidden method requires the head") {
    Prediction pe = pred_with_d({0.2, 0.8});
    Prediction pc = pred_with_d({0.3, 0.4});
    auto cfg = cfg_with(SelectionMethod::hidden_sum, {}, false);
    CHECK_THROWS_AS(da_select(pe, pc, cfg, nullptr), ShapeError);
  }
}

TEST_CASE("align") {
  SUBCASE("identical sequences map to identity") {
    auto m = align({"a", "b", "c"}, {"a", "b", "c"});
    CHECK(m == std::vector<int>{0, 1, 2});
  }
  SUBCASE("paper case: sad into i-would-feel-sad") {
    auto m = align({"sad"}, {"i", "would", "feel", "sad"});
    CHECK(m == std::vector<int>{3});
  }
  SUBCASE("matches pack toward the embedded occurrence") {
    auto m = align({"a", "b"}, {"a", "x", "a", "b"});
    CHECK(m == std::vector<int>{2, 3});
  }
  SUBCASE("unmatched tokens map to null") {
    auto m = align({"q", "b"}, {"a", "b"});
    CHECK(m == std::vector<int>{-1, 1});
  }
  SUBCASE("matched indices strictly increase (property)") {
    Rng rng(15);
    const char* pool[] = {"a", "b", "c", "d"};
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::string> orig, comp;
      std::size_t n = 1 + rng.next_below(6), m = 1 + rng.next_below(8);
      for (std::size_t i = 0; i < n; ++i) orig.push_back(pool[rng.next_below(4)]);
      for (std::size_t i = 0; i < m; ++i) comp.push_back(pool[rng.next_below(4)]);
      auto map = align(orig, comp);
      int prev = -1;
      for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] < 0) continue;
        CHECK(map[i] > prev);
        CHECK(orig[i] == comp[map[i]]);
        prev = map[i];
      }
    }
  }
}

TEST_CASE("project_frames flags completed-only arguments context-side") {
  // original "sad", completed "i would feel sad"
  auto alignment = align({"sad"}, {"i", "would", "feel", "sad"});
  auto frames = project_frames(
      {frame(PredicateSource::in_utterance, {{2, 2}},
             {{"ARG1", 3, 3, false}, {"ARG0", 0, 0, false}})},
      alignment);
  REQUIRE(frames.size() == 1);
  // predicate "feel" lives only in the completion: becomes a context predicate
  CHECK(frames[0].predicate_source == PredicateSource::in_context);
  REQUIRE(frames[0].args.size() == 2);
  CHECK(frames[0].args[0].start == 0);
  CHECK(frames[0].args[0].end == 0);
  CHECK_FALSE(frames[0].args[0].context_side);
  CHECK(frames[0].args[1].context_side);  // ARG0 "i" exists only in completion
}

TEST_CASE("srl_select_rule") {
  auto alignment = align({"not", "really"}, {"no", "i", "do", "not", "really"});
  std::vector<SrlFrame> frames_c = {frame(PredicateSource::in_utterance, {{2, 2}},
                                          {{"ARG1", 3, 4, false}})};
  SUBCASE("original predicate wins verbatim") {
    std::vector<SrlFrame> frames_e = {frame(PredicateSource::in_utterance, {{0, 0}},
                                            {{"ARG0", 1, 1, false}})};
    auto out = srl_select_rule(frames_e, frames_c, alignment);
    CHECK(arg_set(out) == arg_set(frames_e));
  }
  SUBCASE("no original predicate falls back to the completed path") {
    auto out = srl_select_rule({}, frames_c, alignment);
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].args.size() == 1);
    CHECK(out[0].args[0].start == 0);  // "not really" maps back to (0, 1)
    CHECK(out[0].args[0].end == 1);
  }
  SUBCASE("both empty stays empty") {
    CHECK(srl_select_rule({}, {}, alignment).empty());
  }
}

TEST_CASE("srl_select_probability") {
  // original: "i watch movies" with predicate; completed adds trailing noise
  std::vector<std::string> orig = {"i", "watch", "movies"};
  std::vector<std::string> comp = {"i", "watch", "movies", "david", "david"};
  auto alignment = align(orig, comp);
  std::vector<SrlFrame> frames_e = {frame(PredicateSource::in_utterance, {{1, 1}},
                                          {{"ARG1", 2, 2, false}})};
  std::vector<SrlFrame> frames_c = {frame(
      PredicateSource::in_utterance, {{1, 1}},
      {{"ARG1", 2, 2, false}, {"ARG2", 3, 4, false}})};
  BeamHypothesis beam;
  beam.tokens = {10, 11, 12, 13, 13};
  beam.posteriors = {0.99, 0.99, 0.99, 0.9, 0.85};

  SUBCASE("tau = 0 is the pure completed-path choice per argument") {
    auto out = srl_select_probability(frames_e, frames_c, beam, alignment, 0.0);
    CHECK(arg_set(out) == arg_set(project_frames(frames_c, alignment)));
  }
  SUBCASE("tau > 1 reproduces the rule-based output") {
    auto out = srl_select_probability(frames_e, frames_c, beam, alignment, 1.01);
    CHECK(arg_set(out) == arg_set(srl_select_rule(frames_e, frames_c, alignment)));
  }
  SUBCASE("low-posterior duplicated-token argument falls back to the original") {
    auto out = srl_select_probability(frames_e, frames_c, beam, alignment, 0.95);
    auto args = arg_set(out);
    // the confident ARG1 is kept, the shaky david-david ARG2 is dropped in
    // favor of the original-path prediction for that region (which has none)
    CHECK(args.count({"ARG1", 2, 2, false}) == 1);
    CHECK(args.count({"ARG2", 3, 4, true}) == 0);
    CHECK(args.count({"ARG2", 3, 4, false}) == 0);
  }
  SUBCASE("tau extremes match the pure strategies on random frame sets") {
    Rng rng(41);
    const char* roles[] = {"ARG0", "ARG1", "ARG2"};
    for (int rep = 0; rep < 100; ++rep) {
      std::size_t n_orig = 2 + rng.next_below(3);
      std::size_t n_comp = n_orig + rng.next_below(3);
      std::vector<std::string> o, c;
      const char* pool[] = {"a", "b", "c", "d", "e"};
      for (std::size_t i = 0; i < n_orig; ++i) o.push_back(pool[rng.next_below(5)]);
      for (std::size_t i = 0; i < n_comp; ++i) c.push_back(pool[rng.next_below(5)]);
      auto al = align(o, c);
      // the completed path must carry at least one argument: with none the
      // threshold test is vacuous and the completed path is kept at any tau
      auto random_frames = [&](std::size_t len, bool with_pred, std::size_t min_k) {
        std::vector<SrlFrame> fs;
        std::size_t k = min_k + rng.next_below(3);
        for (std::size_t f = 0; f < k; ++f) {
          std::size_t s = rng.next_below(len);
          std::size_t e = std::min(len - 1, s + rng.next_below(2));
          fs.push_back(frame(
              with_pred ? PredicateSource::in_utterance : PredicateSource::in_context,
              with_pred ? std::make_optional(std::make_pair(s, s)) : std::nullopt,
              {{roles[rng.next_below(3)], s, e, false}}));
        }
        return fs;
      };
      auto fe = random_frames(n_orig, rng.next_double() < 0.7, 0);
      auto fc = random_frames(n_comp, true, 1);
      BeamHypothesis b;
      b.tokens.assign(n_comp, 9);
      for (std::size_t i = 0; i < n_comp; ++i)
        b.posteriors.push_back(0.5 + 0.5 * rng.next_double());
      auto at_zero = srl_select_probability(fe, fc, b, al, 0.0);
      CHECK(arg_set(at_zero) == arg_set(project_frames(fc, al)));
      auto at_high = srl_select_probability(fe, fc, b, al, 1.5);
      CHECK(arg_set(at_high) == arg_set(srl_select_rule(fe, fc, al)));
    }
  }
  SUBCASE("posterior length mismatch is an error") {
    BeamHypothesis bad;
    bad.tokens = {1, 2};
    bad.posteriors = {0.9};
    CHECK_THROWS_AS(srl_select_probability(frames_e, frames_c, bad, alignment, 0.5),
                    ShapeError);
  }
}

TEST_CASE("selection config file round trip") {
  LabelInventory acts = default_act_inventory();
  SelectionConfig cfg = default_selection_config(acts);
  cfg.method = SelectionMethod::hidden_cat;
  cfg.tau = 0.7;
  cfg.theta = 0.4;
  cfg.expert_enabled = false;
  std::string path = "/tmp/elcmp_sel.cfg";
  save_selection_config(path, cfg, acts);
  SelectionConfig loaded = load_selection_config(path, acts);
  CHECK(loaded.method == cfg.method);
  CHECK(loaded.tau == doctest::Approx(cfg.tau));
  CHECK(loaded.theta == doctest::Approx(cfg.theta));
  CHECK(loaded.expert_enabled == cfg.expert_enabled);
  CHECK(loaded.l_da_non == cfg.l_da_non);
  std::remove(path.c_str());

  std::ofstream bad(path, std::ios::trunc);
  bad << "method=logits_sum\nunknown_key=1\n";
  bad.close();
  CHECK_THROWS_AS(load_selection_config(path, acts), CorpusError);
  std::remove(path.c_str());
}
