#include "elcmp/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace elcmp {

using nlohmann::json;

// ---------------------------------------------------------------- BIO

bool bio_valid(const std::vector<std::string>& tags) {
  std::string prev = "O";
  for (const auto& t : tags) {
    if (t == "O") {
      prev = t;
      continue;
    }
    if (t.size() < 3 || (t[0] != 'B' && t[0] != 'I') || t[1] != '-') return false;
    if (t[0] == 'I') {
      std::string role = t.substr(2);
      if (prev != "B-" + role && prev != "I-" + role) return false;
    }
    prev = t;
  }
  return true;
}

std::vector<std::tuple<std::string, std::size_t, std::size_t>> spans_from_bio(
    const std::vector<std::string>& tags) {
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i].size() > 2 && tags[i][0] == 'B') {
      std::string role = tags[i].substr(2);
      std::size_t j = i + 1;
      while (j < tags.size() && tags[j] == "I-" + role) ++j;
      spans.emplace_back(role, i, j - 1);
      i = j;
    } else {
      ++i;
    }
  }
  return spans;
}

// ---------------------------------------------------------------- vocabulary

Vocabulary::Vocabulary() {
  id2tok_ = {"<pad>", "<unk>", "<sos>", "<eos>", "<sep>"};
  for (std::size_t i = 0; i < id2tok_.size(); ++i)
    tok2id_[id2tok_[i]] = static_cast<int>(i);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             std::size_t min_count) {
  if (sentences.empty()) throw CorpusError("build_vocab: empty corpus");
  std::map<std::string, std::size_t> counts;  // ordered for the lexicographic tie-break
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, c] : counts)
    if (c >= min_count) kept.emplace_back(tok, c);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [tok, c] : kept) {
    (void)c;
    if (v.tok2id_.count(tok)) continue;  // reserved literals stay reserved
    v.tok2id_[tok] = static_cast<int>(v.id2tok_.size());
    v.id2tok_.push_back(tok);
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CorpusError("cannot write vocabulary: " + path);
  for (const auto& t : id2tok_) os << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open vocabulary: " + path);
  Vocabulary v;
  std::string line;
  std::size_t idx = 0;
  while (std::getline(is, line)) {
    if (idx < kReserved) {
      if (line != v.id2tok_[idx])
        throw CorpusError("vocabulary file has unexpected reserved token at line " +
                          std::to_string(idx + 1));
    } else {
      v.tok2id_[line] = static_cast<int>(v.id2tok_.size());
      v.id2tok_.push_back(line);
    }
    ++idx;
  }
  return v;
}

int ExtendedVocab::id_or_add(const std::string& token) {
  if (base_->contains(token)) return base_->id(token);
  auto it = extra_ids_.find(token);
  if (it != extra_ids_.end()) return it->second;
  int id = static_cast<int>(base_->size() + extra_.size());
  extra_ids_[token] = id;
  extra_.push_back(token);
  return id;
}

int ExtendedVocab::id(const std::string& token) const {
  if (base_->contains(token)) return base_->id(token);
  auto it = extra_ids_.find(token);
  return it == extra_ids_.end() ? Vocabulary::kUnk : it->second;
}

const std::string& ExtendedVocab::token(int id) const {
  if (id < static_cast<int>(base_->size())) return base_->token(id);
  return extra_.at(id - base_->size());
}

EncodedSource encode_source(const CompletionExample& ex, std::size_t history_depth,
                            const Vocabulary& vocab) {
  EncodedSource enc{{}, {}, ExtendedVocab(&vocab)};
  std::size_t from = ex.context.size() > history_depth ? ex.context.size() - history_depth : 0;
  auto push = [&](const std::string& tok) {
    enc.ids.push_back(vocab.id(tok));
    enc.copy_ids.push_back(enc.ext.id_or_add(tok));
  };
  for (std::size_t t = from; t < ex.context.size(); ++t)
    for (const auto& tok : ex.context[t].tokens) push(tok);
  push("<sep>");
  for (const auto& tok : ex.source) push(tok);
  push("<eos>");
  return enc;
}

// ---------------------------------------------------------------- inventories

LabelInventory LabelInventory::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open label inventory: " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return from_names(std::move(names));
}

LabelInventory LabelInventory::from_names(std::vector<std::string> names) {
  LabelInventory inv;
  inv.names_ = std::move(names);
  for (std::size_t i = 0; i < inv.names_.size(); ++i)
    inv.ids_[inv.names_[i]] = static_cast<int>(i);
  return inv;
}

int LabelInventory::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw CorpusError("unknown label: " + name);
  return it->second;
}

// ---------------------------------------------------------------- JSONL

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw CorpusError("line " + std::to_string(line) + ": " + what);
}

json rename_fields(json j, const FieldMap* fm) {
  if (!fm) return j;
  json out = json::object();
  for (auto& [key, value] : j.items()) {
    auto it = fm->find(key);
    out[it == fm->end() ? key : it->second] = std::move(value);
  }
  return out;
}

std::vector<std::string> parse_tokens(const json& j, std::size_t line,
                                      const char* field) {
  if (!j.is_array()) fail(line, std::string(field) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& t : j) {
    if (!t.is_string()) fail(line, std::string(field) + " must contain strings");
    std::string s = t.get<std::string>();
    for (char c : s)
      if (std::isspace(static_cast<unsigned char>(c)))
        fail(line, std::string(field) + ": token contains whitespace: '" + s + "'");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DialogTurn> parse_context(const json& j, std::size_t line) {
  if (!j.is_array()) fail(line, "context must be an array of turns");
  std::vector<DialogTurn> out;
  for (const auto& turn : j) {
    DialogTurn t;
    std::string sp = turn.value("speaker", "");
    if (sp == "system")
      t.speaker = Speaker::system;
    else if (sp == "user")
      t.speaker = Speaker::user;
    else
      fail(line, "context: speaker must be 'system' or 'user'");
    t.tokens = parse_tokens(turn.at("tokens"), line, "context.tokens");
    if (t.tokens.empty()) fail(line, "context: turn tokens must be nonempty");
    out.push_back(std::move(t));
  }
  return out;
}

json context_to_json(const std::vector<DialogTurn>& ctx) {
  json arr = json::array();
  for (const auto& t : ctx)
    arr.push_back({{"speaker", t.speaker == Speaker::system ? "system" : "user"},
                   {"tokens", t.tokens}});
  return arr;
}

CompletionCase parse_case(const std::string& s, std::size_t line) {
  if (s == "had_ellipsis") return CompletionCase::had_ellipsis;
  if (s == "modified_to_ellipsis") return CompletionCase::modified_to_ellipsis;
  if (s == "already_complete") return CompletionCase::already_complete;
  fail(line, "case: unknown completion case '" + s + "'");
}

const char* case_name(CompletionCase c) {
  switch (c) {
    case CompletionCase::had_ellipsis: return "had_ellipsis";
    case CompletionCase::modified_to_ellipsis: return "modified_to_ellipsis";
    case CompletionCase::already_complete: return "already_complete";
  }
  return "?";
}

template <typename Fn>
void for_each_jsonl(const std::string& path, const FieldMap* fm, Fn&& fn) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open corpus file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail(line_no, "each line must be a JSON object");
    fn(rename_fields(std::move(j), fm), line_no);
  }
}

}  // namespace

FieldMap load_field_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open field map: " + path);
  FieldMap fm;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CorpusError("field map line missing '=': " + line);
    fm[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return fm;
}

CompletionCorpus load_completion_jsonl(const std::string& path, const FieldMap* fm) {
  CompletionCorpus corpus;
  for_each_jsonl(path, fm, [&](json j, std::size_t line) {
    CompletionExample ex;
    if (j.contains("context")) ex.context = parse_context(j["context"], line);
    if (!j.contains("source")) fail(line, "missing field 'source'");
    if (!j.contains("reference")) fail(line, "missing field 'reference'");
    ex.source = parse_tokens(j["source"], line, "source");
    ex.reference = parse_tokens(j["reference"], line, "reference");
    if (ex.reference.empty()) fail(line, "reference: must be nonempty");
    ex.completion_case = parse_case(j.value("case", "had_ellipsis"), line);
    if (ex.completion_case == CompletionCase::already_complete &&
        ex.reference != ex.source)
      fail(line, "case: already_complete requires reference == source");
    corpus.push_back(std::move(ex));
  });
  return corpus;
}

DACorpus load_da_jsonl(const std::string& path, const LabelInventory& acts,
                       const FieldMap* fm) {
  DACorpus corpus;
  for_each_jsonl(path, fm, [&](json j, std::size_t line) {
    DAExample ex;
    if (j.contains("context")) ex.context = parse_context(j["context"], line);
    if (!j.contains("utterance")) fail(line, "missing field 'utterance'");
    ex.utterance = parse_tokens(j["utterance"], line, "utterance");
    if (ex.utterance.empty()) fail(line, "utterance: must be nonempty");
    if (!j.contains("labels") || !j["labels"].is_array() || j["labels"].empty())
      fail(line, "labels: must be a nonempty array");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) fail(line, "labels: must contain strings");
      int id;
      try {
        id = acts.id(l.get<std::string>());
      } catch (const CorpusError&) {
        fail(line, "labels: '" + l.get<std::string>() + "' not in the act inventory");
      }
      ex.labels.push_back(id);
    }
    std::sort(ex.labels.begin(), ex.labels.end());
    if (std::adjacent_find(ex.labels.begin(), ex.labels.end()) != ex.labels.end())
      fail(line, "labels: duplicate label in set");
    corpus.push_back(std::move(ex));
  });
  return corpus;
}

SRLCorpus load_srl_jsonl(const std::string& path, const FieldMap* fm) {
  SRLCorpus corpus;
  for_each_jsonl(path, fm, [&](json j, std::size_t line) {
    SRLExample ex;
    if (j.contains("context")) ex.context = parse_context(j["context"], line);
    if (!j.contains("utterance")) fail(line, "missing field 'utterance'");
    ex.utterance = parse_tokens(j["utterance"], line, "utterance");
    if (ex.utterance.empty()) fail(line, "utterance: must be nonempty");
    if (!j.contains("frames") || !j["frames"].is_array())
      fail(line, "frames: must be an array");
    for (const auto& fj : j["frames"]) {
      SrlAnnotation fr;
      std::string src = fj.value("predicate_source", "");
      if (src == "in_utterance")
        fr.predicate_source = PredicateSource::in_utterance;
      else if (src == "in_context")
        fr.predicate_source = PredicateSource::in_context;
      else
        fail(line, "frames: predicate_source must be in_utterance or in_context");
      if (fj.contains("predicate_span") && !fj["predicate_span"].is_null()) {
        const auto& sp = fj["predicate_span"];
        if (!sp.is_array() || sp.size() != 2) fail(line, "frames: predicate_span must be [start, end]");
        fr.predicate_span = {sp[0].get<std::size_t>(), sp[1].get<std::size_t>()};
        if (fr.predicate_span->first > fr.predicate_span->second ||
            fr.predicate_span->second >= ex.utterance.size())
          fail(line, "frames: predicate_span out of bounds");
      }
      if (fr.predicate_source == PredicateSource::in_utterance && !fr.predicate_span)
        fail(line, "frames: in_utterance predicate requires predicate_span");
      if (!fj.contains("tags")) fail(line, "frames: missing tags");
      fr.tags = parse_tokens(fj["tags"], line, "frames.tags");
      if (fr.tags.size() != ex.utterance.size())
        fail(line, "frames: tags length does not match utterance length");
      if (!bio_valid(fr.tags)) fail(line, "frames: tags are not a valid BIO sequence");
      ex.frames.push_back(std::move(fr));
    }
    corpus.push_back(std::move(ex));
  });
  return corpus;
}

void save_completion_jsonl(const std::string& path, const CompletionCorpus& corpus) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CorpusError("cannot write corpus file: " + path);
  for (const auto& ex : corpus) {
    json j{{"context", context_to_json(ex.context)},
           {"source", ex.source},
           {"reference", ex.reference},
           {"case", case_name(ex.completion_case)}};
    os << j.dump() << "\n";
  }
}

void save_da_jsonl(const std::string& path, const DACorpus& corpus,
                   const LabelInventory& acts) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CorpusError("cannot write corpus file: " + path);
  for (const auto& ex : corpus) {
    json labels = json::array();
    for (int l : ex.labels) labels.push_back(acts.name(l));
    json j{{"context", context_to_json(ex.context)},
           {"utterance", ex.utterance},
           {"labels", labels}};
    os << j.dump() << "\n";
  }
}

void save_srl_jsonl(const std::string& path, const SRLCorpus& corpus) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CorpusError("cannot write corpus file: " + path);
  for (const auto& ex : corpus) {
    json frames = json::array();
    for (const auto& fr : ex.frames) {
      json fj{{"predicate_source", fr.predicate_source == PredicateSource::in_utterance
                                       ? "in_utterance"
                                       : "in_context"},
              {"tags", fr.tags}};
      if (fr.predicate_span)
        fj["predicate_span"] = {fr.predicate_span->first, fr.predicate_span->second};
      else
        fj["predicate_span"] = nullptr;
      frames.push_back(std::move(fj));
    }
    json j{{"context", context_to_json(ex.context)},
           {"utterance", ex.utterance},
           {"frames", frames}};
    os << j.dump() << "\n";
  }
}

// ---------------------------------------------------------------- k-fold

KFoldSplit kfold_split(std::size_t corpus_size, std::size_t k, uint64_t seed,
                       std::size_t test_count) {
  if (k == 0) throw CorpusError("kfold_split: k must be positive");
  if (corpus_size < k + test_count)
    throw CorpusError("kfold_split: corpus of " + std::to_string(corpus_size) +
                      " too small for k=" + std::to_string(k) + " plus test=" +
                      std::to_string(test_count));
  std::vector<std::size_t> idx(corpus_size);
  for (std::size_t i = 0; i < corpus_size; ++i) idx[i] = i;
  Rng rng = Rng::substream(seed, "kfold");
  for (std::size_t i = corpus_size; i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);

  KFoldSplit split;
  split.test.assign(idx.begin(), idx.begin() + test_count);
  std::vector<std::size_t> rest(idx.begin() + test_count, idx.end());
  split.folds.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    auto& [train, val] = split.folds[f];
    for (std::size_t i = 0; i < rest.size(); ++i)
      (i % k == f ? val : train).push_back(rest[i]);
  }
  return split;
}

}  // namespace elcmp
