#include "doctest.h"

#include <cmath>

#include "elcmp/metrics.hpp"
#include "elcmp/selection.hpp"

using namespace elcmp;

namespace {

using Sent = std::vector<std::string>;

SrlFrame frame_with(std::vector<SrlArgSpan> args) {
  SrlFrame f;
  f.predicate_source = PredicateSource::in_context;
  f.args = std::move(args);
  return f;
}

}  // namespace

TEST_CASE("bleu") {
  SUBCASE("identity scores 1") {
    CHECK(bleu({{"a", "b", "c", "d"}}, {{"a", "b", "c", "d"}}) ==
          doctest::Approx(1.0));
  }
  SUBCASE("disjoint unigrams score 0") {
    CHECK(bleu({{"x", "y"}}, {{"a", "b"}}) == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed value with brevity penalty e^(1 - 4/3)") {
    // clipped precisions 3/3, 2/2, 1/1 and the smoothed 4-gram (0+1)/(0+1),
    // so the geometric mean is 1 and only the brevity penalty remains
    double got = bleu({{"the", "cat", "sat"}}, {{"the", "cat", "sat", "down"}});
    CHECK(got == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("empty hypothesis set is an error") {
    CHECK_THROWS_AS(bleu({}, {}), std::invalid_argument);
  }
  SUBCASE("empty reference is an error") {
    CHECK_THROWS_AS(bleu({{"a"}}, {Sent{}}), std::invalid_argument);
  }
  SUBCASE("permutation invariance over example order") {
    std::vector<Sent> hyps = {{"a", "b"}, {"c", "d", "e"}, {"f"}};
    std::vector<Sent> refs = {{"a", "b", "c"}, {"c", "d"}, {"f", "g"}};
    double forward = bleu(hyps, refs);
    std::vector<Sent> hyps_r(hyps.rbegin(), hyps.rend());
    std::vector<Sent> refs_r(refs.rbegin(), refs.rend());
    CHECK(forward == doctest::Approx(bleu(hyps_r, refs_r)).epsilon(1e-15));
  }
}

TEST_CASE("exact match and word prf") {
  SUBCASE("all identical") {
    std::vector<Sent> s = {{"a"}, {"b", "c"}};
    CHECK(exact_match(s, s) == doctest::Approx(1.0));
    Prf p = word_prf(s, s);
    CHECK(p.precision == doctest::Approx(1.0));
    CHECK(p.recall == doctest::Approx(1.0));
    CHECK(p.f1 == doctest::Approx(1.0));
  }
  SUBCASE("hand multiset intersection") {
    Prf p = word_prf({{"a", "a", "b"}}, {{"a", "b", "b"}});
    CHECK(p.precision == doctest::Approx(2.0 / 3));
    CHECK(p.recall == doctest::Approx(2.0 / 3));
    CHECK(p.f1 == doctest::Approx(2.0 / 3));
  }
  SUBCASE("empty hypothesis against nonempty reference") {
    Prf p = word_prf({Sent{}}, {{"a", "b"}});
    CHECK(p.precision == 0.0);
    CHECK(p.recall == 0.0);
    CHECK(p.f1 == 0.0);
  }
  SUBCASE("em counts only token-identical pairs") {
    CHECK(exact_match({{"a"}, {"b"}}, {{"a"}, {"c"}}) == doctest::Approx(0.5));
  }
}

TEST_CASE("multilabel prf") {
  SUBCASE("perfect prediction") {
    Prf p = multilabel_prf({{0, 2}}, {{0, 2}});
    CHECK(p.f1 == doctest::Approx(1.0));
  }
  SUBCASE("hand counts: pred {a}, gold {a, b}") {
    Prf p = multilabel_prf({{0}}, {{0, 1}});
    CHECK(p.precision == doctest::Approx(1.0));
    CHECK(p.recall == doctest::Approx(0.5));
    CHECK(p.f1 == doctest::Approx(2.0 / 3));
  }
  SUBCASE("fully wrong prediction") {
    Prf p = multilabel_prf({{1}}, {{0}});
    CHECK(p.precision == 0.0);
    CHECK(p.recall == 0.0);
    CHECK(p.f1 == 0.0);
  }
  SUBCASE("f1 is bounded by max(precision, recall) on random sets (property)") {
    Rng rng(55);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<std::vector<int>> pred, gold;
      for (int k = 0; k < 6; ++k) {
        std::vector<int> p, g;
        for (int l = 0; l < 5; ++l) {
          if (rng.next_double() < 0.4) p.push_back(l);
          if (rng.next_double() < 0.4) g.push_back(l);
        }
        if (g.empty()) g.push_back(0);
        if (p.empty()) p.push_back(1);
        pred.push_back(p);
        gold.push_back(g);
      }
      Prf r = multilabel_prf(pred, gold);
      CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
      CHECK(r.precision >= 0.0);
      CHECK(r.precision <= 1.0);
      CHECK(r.recall >= 0.0);
      CHECK(r.recall <= 1.0);
      if (std::abs(r.precision - r.recall) < 1e-12 && r.precision > 0)
        CHECK(r.f1 == doctest::Approx(r.precision));
    }
  }
}

TEST_CASE("srl span prf") {
  SUBCASE("exact match scores 1/1/1") {
    std::vector<std::vector<SrlFrame>> pred = {
        {frame_with({{"ARG1", 0, 1, false}})}};
    Prf p = srl_span_prf(pred, pred, SrlScoringMode::modified);
    CHECK(p.f1 == doctest::Approx(1.0));
  }
  SUBCASE("role or span mismatch does not count") {
    std::vector<std::vector<SrlFrame>> pred = {{frame_with({{"ARG1", 0, 1, false}})}};
    std::vector<std::vector<SrlFrame>> gold = {{frame_with({{"ARG2", 0, 1, false}})}};
    CHECK(srl_span_prf(pred, gold, SrlScoringMode::modified).f1 == 0.0);
    std::vector<std::vector<SrlFrame>> gold2 = {{frame_with({{"ARG1", 0, 2, false}})}};
    CHECK(srl_span_prf(pred, gold2, SrlScoringMode::modified).f1 == 0.0);
  }
  SUBCASE("empty-output penalty: hand-computed two-example corpus") {
    // example 1: gold has two spans, prediction is empty
    // example 2: one span, predicted correctly
    std::vector<std::vector<SrlFrame>> pred = {
        {}, {frame_with({{"ARG1", 0, 0, false}})}};
    std::vector<std::vector<SrlFrame>> gold = {
        {frame_with({{"ARG0", 0, 0, false}, {"ARG1", 1, 2, false}})},
        {frame_with({{"ARG1", 0, 0, false}})}};
    Prf standard = srl_span_prf(pred, gold, SrlScoringMode::standard);
    CHECK(standard.precision == doctest::Approx(1.0));
    CHECK(standard.recall == doctest::Approx(1.0));  // empty output ignored
    Prf modified = srl_span_prf(pred, gold, SrlScoringMode::modified);
    CHECK(modified.precision == doctest::Approx(1.0));
    CHECK(modified.recall == doctest::Approx(1.0 / 3));  // two extra FNs
    CHECK(modified.f1 == doctest::Approx(0.5));
    CHECK(modified.recall <= standard.recall);
  }
  SUBCASE("corresponding-parts restriction via projection") {
    // original "sad", completed "i would feel sad"; the completed path tags
    // ARG1 over "sad" and ARG0 over completed-only "i"
    auto alignment = align({"sad"}, {"i", "would", "feel", "sad"});
    std::vector<SrlFrame> completed = {frame_with(
        {{"ARG1", 3, 3, false}, {"ARG0", 0, 0, false}})};
    auto projected = project_frames(completed, alignment);
    std::vector<std::vector<SrlFrame>> pred = {projected};
    std::vector<std::vector<SrlFrame>> gold = {{frame_with({{"ARG1", 0, 0, false}})}};
    Prf modified = srl_span_prf(pred, gold, SrlScoringMode::modified);
    CHECK(modified.precision == doctest::Approx(1.0));  // context-side arg excluded
    CHECK(modified.recall == doctest::Approx(1.0));
    Prf standard = srl_span_prf(pred, gold, SrlScoringMode::standard);
    CHECK(standard.precision == doctest::Approx(0.5));  // counted as a stray span
  }
  SUBCASE("modes coincide without empty predictions or exclusions") {
    std::vector<std::vector<SrlFrame>> pred = {
        {frame_with({{"ARG0", 0, 0, false}})},
        {frame_with({{"ARG1", 1, 2, false}, {"ARG2", 0, 0, false}})}};
    std::vector<std::vector<SrlFrame>> gold = {
        {frame_with({{"ARG0", 0, 0, false}})},
        {frame_with({{"ARG1", 1, 2, false}})}};
    Prf a = srl_span_prf(pred, gold, SrlScoringMode::standard);
    Prf b = srl_span_prf(pred, gold, SrlScoringMode::modified);
    CHECK(a.precision == doctest::Approx(b.precision));
    CHECK(a.recall == doctest::Approx(b.recall));
    CHECK(a.f1 == doctest::Approx(b.f1));
  }
}
