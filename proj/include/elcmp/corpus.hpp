// Data model for dialogs and the three task corpora, plus vocabulary
// machinery for the copy mechanism (base vocab + per-example temporary ids).
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "elcmp/rng.hpp"

namespace elcmp {

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Speaker { system, user };

struct DialogTurn {
  Speaker speaker = Speaker::system;
  std::vector<std::string> tokens;  // lowercase, whitespace-free
};

enum class CompletionCase { had_ellipsis, modified_to_ellipsis, already_complete };

struct CompletionExample {
  std::vector<DialogTurn> context;  // most recent last
  std::vector<std::string> source;
  std::vector<std::string> reference;
  CompletionCase completion_case = CompletionCase::had_ellipsis;
};

struct DAExample {
  std::vector<DialogTurn> context;
  std::vector<std::string> utterance;
  std::vector<int> labels;  // sorted unique ids into the act inventory
};

enum class PredicateSource { in_utterance, in_context };

// One annotated frame: where the predicate lives plus per-token BIO tags
// over the user utterance (argument spans only; the predicate is carried
// separately).
struct SrlAnnotation {
  PredicateSource predicate_source = PredicateSource::in_utterance;
  std::optional<std::pair<std::size_t, std::size_t>> predicate_span;  // inclusive
  std::vector<std::string> tags;
};

struct SRLExample {
  std::vector<DialogTurn> context;
  std::vector<std::string> utterance;
  std::vector<SrlAnnotation> frames;
};

using CompletionCorpus = std::vector<CompletionExample>;
using DACorpus = std::vector<DAExample>;
using SRLCorpus = std::vector<SRLExample>;

// ---- BIO helpers ----
bool bio_valid(const std::vector<std::string>& tags);
// Maximal B-X (I-X)* runs as (role, start, end) triples, inclusive ends.
std::vector<std::tuple<std::string, std::size_t, std::size_t>> spans_from_bio(
    const std::vector<std::string>& tags);

// ---- vocabulary ----
class Vocabulary {
 public:
  static constexpr int kPad = 0, kUnk = 1, kSos = 2, kEos = 3, kSep = 4;
  static constexpr std::size_t kReserved = 5;

  Vocabulary();

  // Tokens with count >= min_count, ids assigned by count desc then
  // lexicographic, after the reserved block.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          std::size_t min_count);

  int id(const std::string& token) const {
    auto it = tok2id_.find(token);
    return it == tok2id_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return tok2id_.count(token) > 0; }
  const std::string& token(int id) const { return id2tok_.at(id); }
  std::size_t size() const { return id2tok_.size(); }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> id2tok_;
  std::unordered_map<std::string, int> tok2id_;
};

// Per-example extension of the base vocabulary with temporary ids for
// out-of-vocabulary source tokens. Temporary ids start at |base|.
class ExtendedVocab {
 public:
  explicit ExtendedVocab(const Vocabulary* base) : base_(base) {}

  int id_or_add(const std::string& token);
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return base_->size() + extra_.size(); }
  std::size_t base_size() const { return base_->size(); }
  std::size_t n_temporary() const { return extra_.size(); }

 private:
  const Vocabulary* base_;
  std::vector<std::string> extra_;
  std::unordered_map<std::string, int> extra_ids_;
};

// Encoder input for one completion example: the last `history_depth` context
// turns, SEP, the source utterance, EOS. copy_ids maps every encoder
// position to its extended-vocab id (temporary for OOV tokens).
struct EncodedSource {
  std::vector<int> ids;       // base-vocab ids fed to the encoder
  std::vector<int> copy_ids;  // extended ids, parallel to `ids`
  ExtendedVocab ext;
};

EncodedSource encode_source(const CompletionExample& ex, std::size_t history_depth,
                            const Vocabulary& vocab);

// ---- label inventories ----
class LabelInventory {
 public:
  static LabelInventory load(const std::string& path);  // one label per line
  static LabelInventory from_names(std::vector<std::string> names);
  int id(const std::string& name) const;  // throws on unknown
  const std::string& name(int id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

// ---- JSONL ingestion ----
// Optional renaming of top-level fields (their name -> canonical name), so
// externally produced files can be ingested without rewriting.
using FieldMap = std::unordered_map<std::string, std::string>;
FieldMap load_field_map(const std::string& path);

CompletionCorpus load_completion_jsonl(const std::string& path,
                                       const FieldMap* field_map = nullptr);
DACorpus load_da_jsonl(const std::string& path, const LabelInventory& acts,
                       const FieldMap* field_map = nullptr);
SRLCorpus load_srl_jsonl(const std::string& path,
                         const FieldMap* field_map = nullptr);

void save_completion_jsonl(const std::string& path, const CompletionCorpus& corpus);
void save_da_jsonl(const std::string& path, const DACorpus& corpus,
                   const LabelInventory& acts);
void save_srl_jsonl(const std::string& path, const SRLCorpus& corpus);

// ---- splitting ----
struct KFoldSplit {
  std::vector<std::size_t> test;  // held-out indices
  // per fold: (train indices, validation indices) over the non-test portion
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
};

KFoldSplit kfold_split(std::size_t corpus_size, std::size_t k, uint64_t seed,
                       std::size_t test_count);

}  // namespace elcmp
