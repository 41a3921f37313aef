#include "elcmp/understanding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace elcmp {

// ---------------------------------------------------------------- DA

DAClassifier::DAClassifier(DAConfig cfg, Vocabulary vocab, std::size_t n_labels,
                           uint64_t seed, const std::string& name)
    : cfg_(cfg),
      vocab_(std::move(vocab)),
      n_labels_(n_labels),
      embed_(name + ".embed", {vocab_.size(), cfg.embed_dim}),
      enc_(name + ".enc", cfg.embed_dim, cfg.hidden, cfg.layers),
      out_w_(name + ".out.w", {n_labels, 2 * cfg.hidden}),
      out_b_(name + ".out.b", {n_labels}) {
  Rng rng = Rng::substream(seed, name + "-init");
  for (auto* p : params()) p->init_xavier(rng);
  out_b_.value.fill(0.0);
}

std::vector<Parameter*> DAClassifier::params() {
  std::vector<Parameter*> out{&embed_};
  enc_.collect(out);
  out.push_back(&out_w_);
  out.push_back(&out_b_);
  return out;
}

std::pair<Tape::Var, Tape::Var> DAClassifier::forward(Tape& t,
                                                      const std::vector<int>& ids,
                                                      bool training, Rng& rng) {
  if (ids.empty()) throw ShapeError("da_forward: empty utterance");
  std::vector<Tape::Var> inputs;
  inputs.reserve(ids.size());
  for (int id : ids) inputs.push_back(t.lookup(embed_, id));
  EncoderOut enc = enc_.encode(t, inputs, cfg_.dropout, rng, training);
  Tape::Var pooled = t.concat2(enc.final_h_fwd.back(), enc.final_h_bwd.back());
  Tape::Var scores = t.affine(t.dropout(pooled, cfg_.dropout, rng, training),
                              out_w_, &out_b_);
  return {scores, pooled};
}

Prediction DAClassifier::predict(const std::vector<DialogTurn>& context,
                                 const std::vector<std::string>& utterance) {
  (void)context;  // the desk-scale encoder reads the utterance only
  std::vector<int> ids;
  ids.reserve(utterance.size());
  for (const auto& tok : utterance) ids.push_back(vocab_.id(tok));
  Tape t;
  Rng rng(0);
  auto [scores, pooled] = forward(t, ids, false, rng);
  Prediction pred;
  pred.D = Tensor({n_labels_});
  for (std::size_t i = 0; i < n_labels_; ++i)
    pred.D.v[i] = 1.0 / (1.0 + std::exp(-t.val(scores).v[i]));
  pred.H = t.val(pooled);
  return pred;
}

std::vector<int> da_decide(const Tensor& D, double theta) {
  std::vector<int> out;
  for (std::size_t i = 0; i < D.size(); ++i)
    if (D.v[i] >= theta) out.push_back(static_cast<int>(i));
  if (out.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < D.size(); ++i)
      if (D.v[i] > D.v[best]) best = i;  // lowest id wins ties
    out.push_back(static_cast<int>(best));
  }
  return out;
}

TrainReport da_train(DAClassifier& clf, const DACorpus& corpus,
                     const std::vector<std::size_t>& train_idx,
                     const OptimizerConfig& opt, std::size_t epochs, uint64_t seed) {
  TrainReport report;
  Optimizer optimizer(opt);
  Rng shuffle_rng = Rng::substream(seed, "da-shuffle");
  Rng dropout_rng = Rng::substream(seed, "da-dropout");
  auto params = clf.params();
  std::vector<std::size_t> order = train_idx;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    double total = 0.0;
    for (std::size_t idx : order) {
      const DAExample& ex = corpus[idx];
      std::vector<int> ids;
      for (const auto& tok : ex.utterance) ids.push_back(clf.vocab().id(tok));
      Tensor targets({clf.n_labels()});
      for (int l : ex.labels) targets.v[l] = 1.0;
      for (auto* p : params) p->zero_grad();
      Tape t;
      auto [scores, pooled] = clf.forward(t, ids, true, dropout_rng);
      (void)pooled;
      Tape::Var loss = t.scale_const(t.bce_with_logits(scores, targets),
                                     1.0 / static_cast<double>(clf.n_labels()));
      t.backward(loss);
      total += t.val(loss).v[0];
      optimizer.step(params);
      ++report.steps;
    }
    report.epoch_loss.push_back(order.empty() ? 0.0
                                              : total / static_cast<double>(order.size()));
    optimizer.end_epoch();
  }
  return report;
}

// ---------------------------------------------------------------- tag set

TagSet TagSet::for_roles(const std::vector<std::string>& roles) {
  TagSet ts;
  ts.names.push_back("O");
  for (const auto& r : roles) {
    ts.names.push_back("B-" + r);
    ts.names.push_back("I-" + r);
  }
  return ts;
}

int TagSet::id(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw CorpusError("unknown tag: " + name);
}

bool TagSet::valid_start(int tag) const { return names[tag][0] != 'I'; }

bool TagSet::valid_transition(int prev, int next) const {
  const std::string& n = names[next];
  if (n[0] != 'I') return true;
  const std::string& p = names[prev];
  return (p[0] == 'B' || p[0] == 'I') && p.substr(2) == n.substr(2);
}

// ---------------------------------------------------------------- tagger

SRLTagger::SRLTagger(SRLTaggerConfig cfg, Vocabulary vocab, TagSet tags, uint64_t seed,
                     const std::string& name)
    : cfg_(cfg),
      vocab_(std::move(vocab)),
      tags_(std::move(tags)),
      embed_(name + ".embed", {vocab_.size(), cfg.embed_dim}),
      stack_(name + ".stack", cfg.embed_dim + 1, cfg.hidden, cfg.layers),
      out_w_(name + ".out.w", {tags_.size(), cfg.hidden}),
      out_b_(name + ".out.b", {tags_.size()}) {
  Rng rng = Rng::substream(seed, name + "-init");
  for (auto* p : params()) p->init_xavier(rng);
  out_b_.value.fill(0.0);
}

std::vector<Parameter*> SRLTagger::params() {
  std::vector<Parameter*> out{&embed_};
  stack_.collect(out);
  out.push_back(&out_w_);
  out.push_back(&out_b_);
  return out;
}

std::vector<Tape::Var> SRLTagger::forward(
    Tape& t, const std::vector<int>& ids,
    const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span,
    bool training, Rng& rng) {
  if (ids.empty()) throw ShapeError("srl_forward: empty utterance");
  if (predicate_span &&
      (predicate_span->first > predicate_span->second ||
       predicate_span->second >= ids.size()))
    throw ShapeError("srl_forward: predicate span out of bounds");
  std::vector<Tape::Var> inputs;
  inputs.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Tape::Var e = t.lookup(embed_, ids[i]);
    double on = predicate_span && i >= predicate_span->first &&
                        i <= predicate_span->second
                    ? 1.0
                    : 0.0;
    inputs.push_back(t.concat2(e, t.input(Tensor::scalar(on))));
  }
  std::vector<Tape::Var> hs = stack_.run(t, inputs, cfg_.dropout, rng, training);
  std::vector<Tape::Var> logits;
  logits.reserve(hs.size());
  for (Tape::Var h : hs) logits.push_back(t.affine(h, out_w_, &out_b_));
  return logits;
}

std::vector<Tensor> SRLTagger::emissions(
    const std::vector<std::string>& utterance,
    const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span) {
  std::vector<int> ids;
  ids.reserve(utterance.size());
  for (const auto& tok : utterance) ids.push_back(vocab_.id(tok));
  Tape t;
  Rng rng(0);
  std::vector<Tape::Var> logits = forward(t, ids, predicate_span, false, rng);
  std::vector<Tensor> out;
  out.reserve(logits.size());
  for (Tape::Var z : logits) out.push_back(t.val(t.softmax(z)));
  return out;
}

std::vector<int> viterbi_bio(const std::vector<Tensor>& emissions, const TagSet& tags) {
  if (emissions.empty()) return {};
  std::size_t n = emissions.size(), m = tags.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto logp = [](double p) { return std::log(std::max(p, 1e-300)); };

  std::vector<std::vector<double>> score(n, std::vector<double>(m, kNegInf));
  std::vector<std::vector<int>> back(n, std::vector<int>(m, -1));
  for (std::size_t tag = 0; tag < m; ++tag)
    if (tags.valid_start(static_cast<int>(tag)))
      score[0][tag] = logp(emissions[0].v[tag]);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t tag = 0; tag < m; ++tag) {
      double best = kNegInf;
      int arg = -1;
      for (std::size_t prev = 0; prev < m; ++prev) {
        if (score[i - 1][prev] == kNegInf) continue;
        if (!tags.valid_transition(static_cast<int>(prev), static_cast<int>(tag)))
          continue;
        if (score[i - 1][prev] > best) {
          best = score[i - 1][prev];
          arg = static_cast<int>(prev);
        }
      }
      if (arg >= 0) {
        score[i][tag] = best + logp(emissions[i].v[tag]);
        back[i][tag] = arg;
      }
    }
  }
  std::size_t best_tag = 0;
  for (std::size_t tag = 1; tag < m; ++tag)
    if (score[n - 1][tag] > score[n - 1][best_tag]) best_tag = tag;
  std::vector<int> path(n);
  path[n - 1] = static_cast<int>(best_tag);
  for (std::size_t i = n - 1; i > 0; --i) path[i - 1] = back[i][path[i]];
  return path;
}

SrlFrame extract_frame(
    const std::vector<std::string>& tags, PredicateSource source,
    const std::optional<std::pair<std::size_t, std::size_t>>& predicate_span) {
  SrlFrame fr;
  fr.predicate_source = source;
  fr.predicate_span = predicate_span;
  for (const auto& [role, s, e] : spans_from_bio(tags))
    fr.args.push_back({role, s, e, false});
  return fr;
}

bool has_predicate(const std::vector<SrlFrame>& frames) {
  for (const auto& f : frames)
    if (f.predicate_source == PredicateSource::in_utterance && f.predicate_span)
      return true;
  return false;
}

namespace {

TrainReport tagger_train(
    SRLTagger& tagger, const OptimizerConfig& opt, std::size_t epochs, uint64_t seed,
    const std::string& stream,
    const std::vector<std::pair<const SRLExample*,
                                std::optional<std::pair<std::size_t, std::size_t>>>>&
        instances,
    const std::vector<std::vector<int>>& gold_tag_ids) {
  TrainReport report;
  Optimizer optimizer(opt);
  Rng shuffle_rng = Rng::substream(seed, stream + "-shuffle");
  Rng dropout_rng = Rng::substream(seed, stream + "-dropout");
  auto params = tagger.params();
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    double total = 0.0;
    for (std::size_t k : order) {
      const auto& [ex, span] = instances[k];
      std::vector<int> ids;
      for (const auto& tok : ex->utterance) ids.push_back(tagger.vocab().id(tok));
      for (auto* p : params) p->zero_grad();
      Tape t;
      std::vector<Tape::Var> logits = tagger.forward(t, ids, span, true, dropout_rng);
      std::vector<Tape::Var> losses;
      for (std::size_t i = 0; i < logits.size(); ++i)
        losses.push_back(t.ce_with_logits(logits[i],
                                          static_cast<std::size_t>(gold_tag_ids[k][i])));
      Tape::Var loss = t.scale_const(t.sum_scalars(losses),
                                     1.0 / static_cast<double>(losses.size()));
      t.backward(loss);
      total += t.val(loss).v[0];
      optimizer.step(params);
      ++report.steps;
    }
    report.epoch_loss.push_back(order.empty() ? 0.0
                                              : total / static_cast<double>(order.size()));
    optimizer.end_epoch();
  }
  return report;
}

}  // namespace

TrainReport srl_train(SRLTagger& tagger, const SRLCorpus& corpus,
                      const std::vector<std::size_t>& train_idx,
                      const OptimizerConfig& opt, std::size_t epochs, uint64_t seed,
                      bool in_utterance_only) {
  std::vector<std::pair<const SRLExample*,
                        std::optional<std::pair<std::size_t, std::size_t>>>>
      instances;
  std::vector<std::vector<int>> gold;
  for (std::size_t idx : train_idx) {
    const SRLExample& ex = corpus[idx];
    for (const auto& fr : ex.frames) {
      if (in_utterance_only && fr.predicate_source != PredicateSource::in_utterance)
        continue;
      std::vector<int> tag_ids;
      for (const auto& tag : fr.tags) tag_ids.push_back(tagger.tags().id(tag));
      instances.emplace_back(&ex, fr.predicate_span);
      gold.push_back(std::move(tag_ids));
    }
  }
  return tagger_train(tagger, opt, epochs, seed, "srl", instances, gold);
}

TrainReport predicate_train(SRLTagger& tagger, const SRLCorpus& corpus,
                            const std::vector<std::size_t>& train_idx,
                            const OptimizerConfig& opt, std::size_t epochs,
                            uint64_t seed) {
  std::vector<std::pair<const SRLExample*,
                        std::optional<std::pair<std::size_t, std::size_t>>>>
      instances;
  std::vector<std::vector<int>> gold;
  int b_v = tagger.tags().id("B-V");
  int i_v = tagger.tags().id("I-V");
  for (std::size_t idx : train_idx) {
    const SRLExample& ex = corpus[idx];
    std::vector<int> tag_ids(ex.utterance.size(), 0);  // O
    for (const auto& fr : ex.frames) {
      if (fr.predicate_source != PredicateSource::in_utterance || !fr.predicate_span)
        continue;
      auto [s, e] = *fr.predicate_span;
      tag_ids[s] = b_v;
      for (std::size_t i = s + 1; i <= e; ++i) tag_ids[i] = i_v;
    }
    instances.emplace_back(&ex, std::nullopt);
    gold.push_back(std::move(tag_ids));
  }
  return tagger_train(tagger, opt, epochs, seed, "predid", instances, gold);
}

std::vector<std::pair<std::size_t, std::size_t>> predict_predicates(
    SRLTagger& predicate_tagger, const std::vector<std::string>& utterance) {
  std::vector<Tensor> em = predicate_tagger.emissions(utterance, std::nullopt);
  std::vector<int> path = viterbi_bio(em, predicate_tagger.tags());
  std::vector<std::string> names;
  names.reserve(path.size());
  for (int tag : path) names.push_back(predicate_tagger.tags().names[tag]);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& [role, s, e] : spans_from_bio(names))
    if (role == "V") spans.emplace_back(s, e);
  return spans;
}

std::vector<SrlFrame> tag_utterance(SRLTagger& predicate_tagger, SRLTagger& arg_tagger,
                                    const std::vector<std::string>& utterance) {
  std::vector<SrlFrame> frames;
  for (const auto& span : predict_predicates(predicate_tagger, utterance)) {
    std::vector<Tensor> em = arg_tagger.emissions(utterance, span);
    std::vector<int> path = viterbi_bio(em, arg_tagger.tags());
    std::vector<std::string> names;
    names.reserve(path.size());
    for (int tag : path) names.push_back(arg_tagger.tags().names[tag]);
    frames.push_back(extract_frame(names, PredicateSource::in_utterance, span));
  }
  return frames;
}

}  // namespace elcmp
