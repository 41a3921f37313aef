#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "elcmp/corpus.hpp"
#include "elcmp/synthetic.hpp"

using namespace elcmp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/elcmp_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream os(path, std::ios::trunc);
    os << content;
  }
};

}  // namespace

TEST_CASE("build_vocab") {
  SUBCASE("min_count 1 keeps both tokens after the reserved block") {
    Vocabulary v = Vocabulary::build({{"a", "a", "b"}}, 1);
    CHECK(v.id("a") == static_cast<int>(Vocabulary::kReserved));
    CHECK(v.id("b") == static_cast<int>(Vocabulary::kReserved) + 1);
    CHECK(v.size() == Vocabulary::kReserved + 2);
  }
  SUBCASE("min_count 2 drops singletons to UNK") {
    Vocabulary v = Vocabulary::build({{"a", "a", "b"}}, 2);
    CHECK(v.contains("a"));
    CHECK_FALSE(v.contains("b"));
    CHECK(v.id("b") == Vocabulary::kUnk);
  }
  SUBCASE("two runs give identical tables") {
    std::vector<std::vector<std::string>> corpus = {
        {"cats", "dogs", "cats"}, {"zebras", "dogs", "apes", "dogs"}};
    Vocabulary a = Vocabulary::build(corpus, 1);
    Vocabulary b = Vocabulary::build(corpus, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.token(i) == b.token(i));
    // count desc then lexicographic: dogs(3), cats(2), then apes, zebras
    CHECK(a.token(Vocabulary::kReserved) == "dogs");
    CHECK(a.token(Vocabulary::kReserved + 1) == "cats");
    CHECK(a.token(Vocabulary::kReserved + 2) == "apes");
    CHECK(a.token(Vocabulary::kReserved + 3) == "zebras");
  }
  SUBCASE("empty corpus is an error") {
    CHECK_THROWS_AS(Vocabulary::build({}, 1), CorpusError);
  }
}

TEST_CASE("encode_source") {
  Vocabulary v = Vocabulary::build({{"do", "you", "like", "dogs", "yes"}}, 1);
  CompletionExample ex;
  ex.context = {{Speaker::system, {"do", "you", "like", "dogs"}}};
  ex.source = {"yes"};
  ex.reference = {"yes", "i", "like", "dogs"};

  SUBCASE("history_depth 0 encodes the utterance only") {
    EncodedSource enc = encode_source(ex, 0, v);
    CHECK(enc.ids.size() == 3);  // SEP yes EOS
    CHECK(enc.ids[0] == Vocabulary::kSep);
    CHECK(enc.ids[1] == v.id("yes"));
    CHECK(enc.ids[2] == Vocabulary::kEos);
  }
  SUBCASE("hand-encoded with one turn of history") {
    EncodedSource enc = encode_source(ex, 1, v);
    std::vector<int> want = {v.id("do"),  v.id("you"), v.id("like"), v.id("dogs"),
                             Vocabulary::kSep, v.id("yes"), Vocabulary::kEos};
    CHECK(enc.ids == want);
    CHECK(enc.copy_ids == want);  // everything in base vocab
  }
  SUBCASE("OOV source token gets a temporary id at |base|") {
    ex.source = {"zorblat"};
    EncodedSource enc = encode_source(ex, 1, v);
    CHECK(enc.ids[5] == Vocabulary::kUnk);
    CHECK(enc.copy_ids[5] == static_cast<int>(v.size()));
    CHECK(enc.ext.token(enc.copy_ids[5]) == "zorblat");
    CHECK(enc.ext.n_temporary() == 1);
  }
  SUBCASE("each unique OOV token gets exactly one id") {
    ex.source = {"zorblat", "qux", "zorblat"};
    EncodedSource enc = encode_source(ex, 0, v);
    CHECK(enc.ext.n_temporary() == 2);
    CHECK(enc.copy_ids[1] == enc.copy_ids[3]);  // both zorblat positions
  }
  SUBCASE("copy ids reconstruct the encoded token sequence (injectivity)") {
    SyntheticCorpora data = generate_synthetic(19, 60);
    for (const auto& gen_ex : data.completion) {
      EncodedSource enc = encode_source(gen_ex, 1, v);
      std::vector<std::string> reconstructed;
      for (int id : enc.copy_ids) reconstructed.push_back(enc.ext.token(id));
      std::vector<std::string> expected;
      for (const auto& tok : gen_ex.context.back().tokens) expected.push_back(tok);
      expected.push_back("<sep>");
      for (const auto& tok : gen_ex.source) expected.push_back(tok);
      expected.push_back("<eos>");
      CHECK(reconstructed == expected);
    }
  }
}

TEST_CASE("jsonl round trips and validation") {
  LabelInventory acts = default_act_inventory();

  SUBCASE("empty file loads as empty corpus") {
    TempFile f("empty.jsonl");
    f.write("");
    CHECK(load_completion_jsonl(f.path).empty());
  }
  SUBCASE("completion round trip is identity") {
    SyntheticCorpora data = generate_synthetic(3, 40);
    TempFile f("completion.jsonl");
    save_completion_jsonl(f.path, data.completion);
    CompletionCorpus loaded = load_completion_jsonl(f.path);
    REQUIRE(loaded.size() == data.completion.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      CHECK(loaded[i].source == data.completion[i].source);
      CHECK(loaded[i].reference == data.completion[i].reference);
      CHECK(loaded[i].completion_case == data.completion[i].completion_case);
      CHECK(loaded[i].context.size() == data.completion[i].context.size());
    }
  }
  SUBCASE("srl round trip is identity") {
    SyntheticCorpora data = generate_synthetic(3, 40);
    TempFile f("srl.jsonl");
    save_srl_jsonl(f.path, data.srl);
    SRLCorpus loaded = load_srl_jsonl(f.path);
    REQUIRE(loaded.size() == data.srl.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      CHECK(loaded[i].utterance == data.srl[i].utterance);
      REQUIRE(loaded[i].frames.size() == data.srl[i].frames.size());
      for (std::size_t j = 0; j < loaded[i].frames.size(); ++j)
        CHECK(loaded[i].frames[j].tags == data.srl[i].frames[j].tags);
    }
  }
  SUBCASE("duplicate DA label errors citing the field and line") {
    TempFile f("dup.jsonl");
    f.write(R"({"utterance":["hi"],"labels":["hold","hold"]})" "\n");
    bool threw = false;
    try {
      load_da_jsonl(f.path, acts);
    } catch (const CorpusError& e) {
      threw = true;
      std::string msg = e.what();
      CHECK(msg.find("labels") != std::string::npos);
      CHECK(msg.find("line 1") != std::string::npos);
    }
    CHECK(threw);
  }
  SUBCASE("malformed json reports the line number") {
    TempFile f("bad.jsonl");
    f.write("{\"source\": [\"a\"], \"reference\": [\"a\"]}\nnot json\n");
    bool threw = false;
    try {
      load_completion_jsonl(f.path);
    } catch (const CorpusError& e) {
      threw = true;
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(threw);
  }
  SUBCASE("already_complete with mismatched reference is rejected") {
    TempFile f("mismatch.jsonl");
    f.write(R"({"source":["a"],"reference":["a","b"],"case":"already_complete"})" "\n");
    CHECK_THROWS_AS(load_completion_jsonl(f.path), CorpusError);
  }
  SUBCASE("invalid BIO is rejected") {
    TempFile f("bio.jsonl");
    f.write(
        R"({"utterance":["a","b"],"frames":[{"predicate_source":"in_context","predicate_span":null,"tags":["O","I-ARG1"]}]})" "\n");
    CHECK_THROWS_AS(load_srl_jsonl(f.path), CorpusError);
  }
  SUBCASE("field map renames top-level fields") {
    TempFile f("mapped.jsonl");
    f.write(R"({"text":["yes"],"acts":["hold"]})" "\n");
    FieldMap fm{{"text", "utterance"}, {"acts", "labels"}};
    DACorpus corpus = load_da_jsonl(f.path, acts, &fm);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus[0].utterance == std::vector<std::string>{"yes"});
  }
}

TEST_CASE("bio helpers") {
  CHECK(bio_valid({"O", "B-ARG1", "I-ARG1", "O"}));
  CHECK_FALSE(bio_valid({"I-ARG1"}));
  CHECK_FALSE(bio_valid({"B-ARG0", "I-ARG1"}));
  auto spans = spans_from_bio({"B-ARG1", "I-ARG1", "O", "B-V"});
  REQUIRE(spans.size() == 2);
  CHECK(std::get<0>(spans[0]) == "ARG1");
  CHECK(std::get<1>(spans[0]) == 0);
  CHECK(std::get<2>(spans[0]) == 1);
  CHECK(std::get<0>(spans[1]) == "V");
}

TEST_CASE("kfold_split") {
  SUBCASE("10 examples, k=5, test=0 gives five folds of two") {
    KFoldSplit s = kfold_split(10, 5, 42, 0);
    CHECK(s.test.empty());
    for (const auto& [train, val] : s.folds) {
      CHECK(val.size() == 2);
      CHECK(train.size() == 8);
    }
  }
  SUBCASE("same seed twice gives identical folds") {
    KFoldSplit a = kfold_split(23, 4, 7, 5);
    KFoldSplit b = kfold_split(23, 4, 7, 5);
    CHECK(a.test == b.test);
    for (std::size_t i = 0; i < a.folds.size(); ++i)
      CHECK(a.folds[i] == b.folds[i]);
  }
  SUBCASE("folds plus test partition the corpus") {
    KFoldSplit s = kfold_split(29, 5, 3, 6);
    std::set<std::size_t> seen(s.test.begin(), s.test.end());
    CHECK(seen.size() == 6);
    std::set<std::size_t> vals;
    for (const auto& [train, val] : s.folds) {
      for (auto i : val) {
        CHECK(vals.insert(i).second);  // pairwise disjoint validation folds
        CHECK_FALSE(seen.count(i));
      }
      // train and val partition the non-test portion
      std::set<std::size_t> fold_all(train.begin(), train.end());
      for (auto i : val) CHECK(fold_all.insert(i).second);
      CHECK(fold_all.size() == 23);
    }
    CHECK(vals.size() == 23);
    // sizes differ by at most one
    std::size_t mn = 99, mx = 0;
    for (const auto& [train, val] : s.folds) {
      mn = std::min(mn, val.size());
      mx = std::max(mx, val.size());
    }
    CHECK(mx - mn <= 1);
  }
  SUBCASE("corpus too small is an error") {
    CHECK_THROWS_AS(kfold_split(4, 5, 1, 0), CorpusError);
    CHECK_THROWS_AS(kfold_split(10, 5, 1, 6), CorpusError);
  }
}
