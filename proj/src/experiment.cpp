#include "elcmp/experiment.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace elcmp {

using nlohmann::json;

// ---------------------------------------------------------------- sha1

namespace {

struct Sha1 {
  uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
  uint64_t total = 0;
  unsigned char block[64];
  std::size_t fill = 0;

  static uint32_t rol(uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

  void process() {
    uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t(block[4 * i]) << 24) | (uint32_t(block[4 * i + 1]) << 16) |
             (uint32_t(block[4 * i + 2]) << 8) | uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      uint32_t f, k;
      if (i < 20) {
        f = (b & c) | ((~b) & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const unsigned char* data, std::size_t len) {
    total += len;
    while (len > 0) {
      std::size_t take = std::min(len, 64 - fill);
      std::copy(data, data + take, block + fill);
      fill += take;
      data += take;
      len -= take;
      if (fill == 64) {
        process();
        fill = 0;
      }
    }
  }

  std::string finish() {
    uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len_be, 8);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (uint32_t word : h)
      for (int i = 28; i >= 0; i -= 4) out += hex[(word >> i) & 0xF];
    return out;
  }
};

}  // namespace

std::string sha1_hex(const std::string& bytes) {
  Sha1 s;
  s.update(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return s.finish();
}

std::string git_blob_sha1_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open file for hashing: " + path);
  std::ostringstream content;
  content << is.rdbuf();
  std::string body = content.str();
  std::string header = "blob " + std::to_string(body.size());
  header.push_back('\0');
  return sha1_hex(header + body);
}

// ---------------------------------------------------------------- config

namespace {

std::size_t to_size(const std::string& v) { return static_cast<std::size_t>(std::stoull(v)); }
double to_double(const std::string& v) { return std::stod(v); }
bool to_bool(const std::string& v) { return v == "true" || v == "on" || v == "1"; }

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") seed = std::stoull(value);
  else if (key == "data_dir") data_dir = value;
  else if (key == "test_count") test_count = to_size(value);
  else if (key == "kfold_k") kfold_k = to_size(value);
  else if (key == "gen_n") gen_n = to_size(value);
  else if (key == "mix.had_ellipsis") mix.had_ellipsis = to_double(value);
  else if (key == "mix.modified_to_ellipsis") mix.modified_to_ellipsis = to_double(value);
  else if (key == "mix.already_complete") mix.already_complete = to_double(value);
  else if (key == "completion.embed") completion.embed_dim = to_size(value);
  else if (key == "completion.hidden") completion.hidden = to_size(value);
  else if (key == "completion.enc_layers") completion.enc_layers = to_size(value);
  else if (key == "completion.dec_layers") completion.dec_layers = to_size(value);
  else if (key == "completion.attn") completion.attn_dim = to_size(value);
  else if (key == "completion.dropout") completion.dropout = to_double(value);
  else if (key == "completion.mixture")
    completion.mixture = value == "softmax_concat" ? MixtureMode::softmax_concat
                                                   : MixtureMode::additive;
  else if (key == "completion.use_copy") completion.use_copy = to_bool(value);
  else if (key == "completion.history_depth") completion.history_depth = to_size(value);
  else if (key == "completion.max_decode_len") completion.max_decode_len = to_size(value);
  else if (key == "completion.min_count") completion_min_count = to_size(value);
  else if (key == "completion.optimizer") completion_opt.kind = value;
  else if (key == "completion.lr") completion_opt.lr = to_double(value);
  else if (key == "completion.clip") completion_opt.clip_norm = to_double(value);
  else if (key == "completion.lr_decay") completion_opt.lr_decay = to_double(value);
  else if (key == "completion.epochs") completion_epochs = to_size(value);
  else if (key == "completion.beam") beam_k = to_size(value);
  else if (key == "da.embed") da.embed_dim = to_size(value);
  else if (key == "da.hidden") da.hidden = to_size(value);
  else if (key == "da.layers") da.layers = to_size(value);
  else if (key == "da.dropout") da.dropout = to_double(value);
  else if (key == "da.theta") da.theta = to_double(value);
  else if (key == "da.optimizer") da_opt.kind = value;
  else if (key == "da.lr") da_opt.lr = to_double(value);
  else if (key == "da.clip") da_opt.clip_norm = to_double(value);
  else if (key == "da.lr_decay") da_opt.lr_decay = to_double(value);
  else if (key == "da.epochs") da_epochs = to_size(value);
  else if (key == "srl.embed") srl.embed_dim = to_size(value);
  else if (key == "srl.hidden") srl.hidden = to_size(value);
  else if (key == "srl.layers") srl.layers = to_size(value);
  else if (key == "srl.dropout") srl.dropout = to_double(value);
  else if (key == "srl.optimizer") srl_opt.kind = value;
  else if (key == "srl.lr") srl_opt.lr = to_double(value);
  else if (key == "srl.clip") srl_opt.clip_norm = to_double(value);
  else if (key == "srl.lr_decay") srl_opt.lr_decay = to_double(value);
  else if (key == "srl.epochs") srl_epochs = to_size(value);
  else if (key == "selection.method") selection_method = value;
  else if (key == "selection.tau") selection_tau = to_double(value);
  else if (key == "selection.theta") selection_theta = to_double(value);
  else if (key == "selection.expert") selection_expert = to_bool(value);
  else if (key == "selection.l_da_non") {
    l_da_non_names.clear();
    std::istringstream names(value);
    std::string name;
    while (std::getline(names, name, ','))
      if (!name.empty()) l_da_non_names.push_back(name);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  RunConfig cfg;
  if (const char* env = std::getenv("ELHYB_DATA_DIR")) cfg.data_dir = env;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " missing '='");
    try {
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument&) {
      throw ConfigError("config line " + std::to_string(line_no) + ": bad value");
    }
  }
  return cfg;
}

json RunConfig::to_json() const {
  json mix_j{{"had_ellipsis", mix.had_ellipsis},
             {"modified_to_ellipsis", mix.modified_to_ellipsis},
             {"already_complete", mix.already_complete}};
  return json{
      {"seed", seed},
      {"data_dir", data_dir},
      {"test_count", test_count},
      {"kfold_k", kfold_k},
      {"gen_n", gen_n},
      {"mix", mix_j},
      {"completion",
       {{"embed", completion.embed_dim},
        {"hidden", completion.hidden},
        {"enc_layers", completion.enc_layers},
        {"dec_layers", completion.dec_layers},
        {"attn", completion.attn_dim},
        {"dropout", completion.dropout},
        {"mixture", completion.mixture == MixtureMode::additive ? "additive"
                                                                : "softmax_concat"},
        {"use_copy", completion.use_copy},
        {"history_depth", completion.history_depth},
        {"max_decode_len", completion.max_decode_len},
        {"min_count", completion_min_count},
        {"optimizer", completion_opt.kind},
        {"lr", completion_opt.lr},
        {"clip", completion_opt.clip_norm},
        {"lr_decay", completion_opt.lr_decay},
        {"epochs", completion_epochs},
        {"beam", beam_k}}},
      {"da",
       {{"embed", da.embed_dim},
        {"hidden", da.hidden},
        {"layers", da.layers},
        {"dropout", da.dropout},
        {"theta", da.theta},
        {"optimizer", da_opt.kind},
        {"lr", da_opt.lr},
        {"clip", da_opt.clip_norm},
        {"epochs", da_epochs}}},
      {"srl",
       {{"embed", srl.embed_dim},
        {"hidden", srl.hidden},
        {"layers", srl.layers},
        {"dropout", srl.dropout},
        {"optimizer", srl_opt.kind},
        {"lr", srl_opt.lr},
        {"clip", srl_opt.clip_norm},
        {"epochs", srl_epochs}}},
      {"selection",
       {{"method", selection_method},
        {"tau", selection_tau},
        {"theta", selection_theta},
        {"expert", selection_expert},
        {"l_da_non", l_da_non_names}}}};
}

SelectionConfig RunConfig::selection(const LabelInventory& acts) const {
  SelectionConfig sel;
  sel.method = selection_method_from_name(selection_method);
  sel.tau = selection_tau;
  sel.theta = selection_theta;
  sel.expert_enabled = selection_expert;
  sel.l_da_non.clear();
  for (const auto& name : l_da_non_names) sel.l_da_non.push_back(acts.id(name));
  std::sort(sel.l_da_non.begin(), sel.l_da_non.end());
  return sel;
}

// ---------------------------------------------------------------- joint model

HybridHiddenModel::HybridHiddenModel(const DAConfig& cfg, Vocabulary vocab,
                                     std::size_t n_labels, SelectionMethod method,
                                     uint64_t seed)
    : method_(method),
      enc_e_(cfg, vocab, n_labels, seed, std::string("hyb_") +
                                             selection_method_name(method) + "_e"),
      enc_c_(cfg, std::move(vocab), n_labels, seed,
             std::string("hyb_") + selection_method_name(method) + "_c"),
      head_(std::string("hyb_") + selection_method_name(method) + "_head", n_labels,
            (method == SelectionMethod::hidden_cat ? 4 : 2) * cfg.hidden) {
  Rng rng = Rng::substream(seed, std::string("hyb-head-") + selection_method_name(method));
  head_.w.init_xavier(rng);
  head_.b.value.fill(0.0);
}

std::vector<Parameter*> HybridHiddenModel::params() {
  std::vector<Parameter*> out = enc_e_.params();
  auto c = enc_c_.params();
  out.insert(out.end(), c.begin(), c.end());
  out.push_back(&head_.w);
  out.push_back(&head_.b);
  return out;
}

TrainReport HybridHiddenModel::train(const DACorpus& original, const DACorpus& completed,
                                     const std::vector<std::size_t>& train_idx,
                                     const OptimizerConfig& opt, std::size_t epochs,
                                     uint64_t seed) {
  TrainReport report;
  Optimizer optimizer(opt);
  std::string stream = std::string("hyb-") + selection_method_name(method_);
  Rng shuffle_rng = Rng::substream(seed, stream + "-shuffle");
  Rng dropout_rng = Rng::substream(seed, stream + "-dropout");
  auto ps = params();
  std::vector<std::size_t> order = train_idx;
  std::size_t n_labels = enc_e_.n_labels();
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    double total = 0.0;
    for (std::size_t idx : order) {
      std::vector<int> ids_e, ids_c;
      for (const auto& tok : original[idx].utterance)
        ids_e.push_back(enc_e_.vocab().id(tok));
      for (const auto& tok : completed[idx].utterance)
        ids_c.push_back(enc_c_.vocab().id(tok));
      Tensor targets({n_labels});
      for (int l : original[idx].labels) targets.v[l] = 1.0;
      for (auto* p : ps) p->zero_grad();
      Tape t;
      auto [se, he] = enc_e_.forward(t, ids_e, true, dropout_rng);
      auto [sc, hc] = enc_c_.forward(t, ids_c, true, dropout_rng);
      (void)se;
      (void)sc;
      Tape::Var h;
      switch (method_) {
        case SelectionMethod::hidden_sum: h = t.add(he, hc); break;
        case SelectionMethod::hidden_max: h = t.ewise_max(he, hc); break;
        default: h = t.concat2(he, hc); break;
      }
      Tape::Var logits = t.affine(h, head_.w, &head_.b);
      Tape::Var loss = t.scale_const(t.bce_with_logits(logits, targets),
                                     1.0 / static_cast<double>(n_labels));
      t.backward(loss);
      total += t.val(loss).v[0];
      optimizer.step(ps);
      ++report.steps;
    }
    report.epoch_loss.push_back(order.empty() ? 0.0
                                              : total / static_cast<double>(order.size()));
    optimizer.end_epoch();
  }
  return report;
}

std::pair<Tensor, Tensor> HybridHiddenModel::pooled(
    const std::vector<std::string>& utt_e, const std::vector<std::string>& utt_c) {
  Prediction pe = enc_e_.predict({}, utt_e);
  Prediction pc = enc_c_.predict({}, utt_c);
  return {pe.H, pc.H};
}

// ---------------------------------------------------------------- completion

CompletionEval evaluate_completion(CompletionModel& model,
                                   const CompletionCorpus& corpus,
                                   const std::vector<std::size_t>& idx) {
  std::vector<std::vector<std::string>> hyps, refs;
  for (std::size_t k : idx) {
    DecodeResult dec = model.greedy_decode(corpus[k].context, corpus[k].source,
                                           model.config().max_decode_len);
    hyps.push_back(dec.tokens);
    refs.push_back(corpus[k].reference);
  }
  CompletionEval eval;
  if (hyps.empty()) return eval;
  eval.em = exact_match(hyps, refs);
  eval.word = word_prf(hyps, refs);
  eval.bleu = bleu(hyps, refs);
  return eval;
}

CompletionRun train_completion_until(CompletionModel& model,
                                     const CompletionCorpus& corpus,
                                     const std::vector<std::size_t>& train_idx,
                                     const std::vector<std::size_t>& eval_idx,
                                     const OptimizerConfig& opt,
                                     std::size_t max_epochs, uint64_t seed,
                                     double target_em, double budget_seconds) {
  CompletionRun run;
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  run.train = train_completion(
      model, corpus, train_idx, opt, max_epochs, seed,
      [&](std::size_t, double) {
        double em = evaluate_completion(model, corpus, eval_idx).em;
        run.em_history.push_back(em);
        run.final_em = em;
        return em >= target_em || elapsed() > budget_seconds;
      });
  return run;
}

std::vector<AutoCompletion> auto_complete(CompletionModel& model,
                                          const CompletionCorpus& corpus,
                                          const std::vector<std::size_t>& idx,
                                          std::size_t beam_k) {
  std::vector<AutoCompletion> out;
  out.reserve(idx.size());
  for (std::size_t k : idx) {
    auto beams = model.beam_decode(corpus[k].context, corpus[k].source, beam_k,
                                   model.config().max_decode_len);
    AutoCompletion ac;
    if (!beams.empty()) {
      const BeamHypothesis& top = beams.front();
      EncodedSource src = model.encode_example(corpus[k]);
      ac.tokens = model.surface(top, src.ext);
      for (std::size_t i = 0; i < ac.tokens.size(); ++i)
        ac.posteriors.push_back(top.posteriors[i]);
    }
    out.push_back(std::move(ac));
  }
  return out;
}

// ---------------------------------------------------------------- training sets

DAModels train_da_models(const DACorpus& original, const DACorpus& completed,
                         const std::vector<std::size_t>& train_idx,
                         const LabelInventory& acts, const DAConfig& cfg,
                         const OptimizerConfig& opt, std::size_t epochs,
                         uint64_t seed, bool with_hidden) {
  std::vector<std::vector<std::string>> sentences;
  for (std::size_t k : train_idx) {
    sentences.push_back(original[k].utterance);
    sentences.push_back(completed[k].utterance);
  }
  DAModels m;
  m.vocab = Vocabulary::build(sentences, 2);
  std::size_t n = acts.size();
  m.el_a = std::make_unique<DAClassifier>(
      cfg, m.vocab, n, Rng::substream(seed, "init-EL-a").next_u64(), "da_el_a");
  m.el_b = std::make_unique<DAClassifier>(
      cfg, m.vocab, n, Rng::substream(seed, "init-EL-b").next_u64(), "da_el_b");
  m.cmp_a = std::make_unique<DAClassifier>(
      cfg, m.vocab, n, Rng::substream(seed, "init-CMP-a").next_u64(), "da_cmp_a");
  m.cmp_b = std::make_unique<DAClassifier>(
      cfg, m.vocab, n, Rng::substream(seed, "init-CMP-b").next_u64(), "da_cmp_b");
  da_train(*m.el_a, original, train_idx, opt, epochs, seed ^ 0xE1A);
  da_train(*m.el_b, original, train_idx, opt, epochs, seed ^ 0xE1B);
  da_train(*m.cmp_a, completed, train_idx, opt, epochs, seed ^ 0xCA);
  da_train(*m.cmp_b, completed, train_idx, opt, epochs, seed ^ 0xCB);
  if (with_hidden) {
    for (SelectionMethod method : {SelectionMethod::hidden_sum,
                                   SelectionMethod::hidden_max,
                                   SelectionMethod::hidden_cat}) {
      auto model = std::make_unique<HybridHiddenModel>(
          cfg, m.vocab, n, method,
          Rng::substream(seed, std::string("init-hyb-") + selection_method_name(method))
              .next_u64());
      model->train(original, completed, train_idx, opt, epochs, seed);
      if (method == SelectionMethod::hidden_sum) m.hidden_sum = std::move(model);
      else if (method == SelectionMethod::hidden_max) m.hidden_max = std::move(model);
      else m.hidden_cat = std::move(model);
    }
  }
  return m;
}

SrlModels train_srl_models(const SRLCorpus& original, const SRLCorpus& completed,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::string>& roles,
                           const SRLTaggerConfig& cfg, const OptimizerConfig& opt,
                           std::size_t epochs, uint64_t seed) {
  std::vector<std::vector<std::string>> sentences;
  for (std::size_t k : train_idx) {
    sentences.push_back(original[k].utterance);
    sentences.push_back(completed[k].utterance);
  }
  Vocabulary vocab = Vocabulary::build(sentences, 2);
  TagSet arg_tags = TagSet::for_roles(roles);
  TagSet v_tags = TagSet::for_roles({"V"});
  SrlModels m;
  m.predid_el = std::make_unique<SRLTagger>(
      cfg, vocab, v_tags, Rng::substream(seed, "init-predid-EL").next_u64(),
      "predid_el");
  m.arg_el = std::make_unique<SRLTagger>(
      cfg, vocab, arg_tags, Rng::substream(seed, "init-arg-EL").next_u64(), "srl_el");
  m.predid_cmp = std::make_unique<SRLTagger>(
      cfg, vocab, v_tags, Rng::substream(seed, "init-predid-CMP").next_u64(),
      "predid_cmp");
  m.arg_cmp = std::make_unique<SRLTagger>(
      cfg, vocab, arg_tags, Rng::substream(seed, "init-arg-CMP").next_u64(), "srl_cmp");
  predicate_train(*m.predid_el, original, train_idx, opt, epochs, seed ^ 0x9E1);
  srl_train(*m.arg_el, original, train_idx, opt, epochs, seed ^ 0xAE1, true);
  predicate_train(*m.predid_cmp, completed, train_idx, opt, epochs, seed ^ 0x9C2);
  srl_train(*m.arg_cmp, completed, train_idx, opt, epochs, seed ^ 0xAC2, false);
  return m;
}

// ---------------------------------------------------------------- grid

GridVariant grid_variant_from_name(const std::string& name) {
  if (name == "el" || name == "EL") return GridVariant::el;
  if (name == "cmp" || name == "CMP") return GridVariant::cmp;
  if (name == "hybrid-el-el" || name == "Hybrid-EL-EL") return GridVariant::hybrid_el_el;
  if (name == "hybrid-cmp-cmp" || name == "Hybrid-CMP-CMP")
    return GridVariant::hybrid_cmp_cmp;
  if (name == "hybrid-el-cmp" || name == "Hybrid-EL-CMP")
    return GridVariant::hybrid_el_cmp;
  throw ConfigError("unknown grid variant: " + name);
}

const char* grid_variant_name(GridVariant v) {
  switch (v) {
    case GridVariant::el: return "EL";
    case GridVariant::cmp: return "CMP";
    case GridVariant::hybrid_el_el: return "Hybrid-EL-EL";
    case GridVariant::hybrid_cmp_cmp: return "Hybrid-CMP-CMP";
    case GridVariant::hybrid_el_cmp: return "Hybrid-EL-CMP";
  }
  return "?";
}

namespace {

bool expert_fires(const Prediction& pred_e, const SelectionConfig& sel) {
  if (!sel.expert_enabled) return false;
  for (int l : da_decide(pred_e.D, sel.theta))
    if (std::binary_search(sel.l_da_non.begin(), sel.l_da_non.end(), l)) return true;
  return false;
}

std::vector<std::string> labels_to_names(const std::vector<int>& labels,
                                         const LabelInventory& acts) {
  std::vector<std::string> out;
  for (int l : labels) out.push_back(acts.name(l));
  return out;
}

}  // namespace

VariantResult run_da_variant(GridVariant variant, const SelectionConfig& sel,
                             DAModels& models, const DACorpus& original,
                             const std::vector<AutoCompletion>& completions,
                             const std::vector<std::size_t>& test_idx,
                             const LabelInventory& acts) {
  if (is_hidden_method(sel.method) && variant != GridVariant::hybrid_el_cmp &&
      variant != GridVariant::el && variant != GridVariant::cmp)
    throw ConfigError("hidden-state selection applies to Hybrid-EL-CMP only");

  HybridHiddenModel* hidden = nullptr;
  if (is_hidden_method(sel.method)) {
    hidden = sel.method == SelectionMethod::hidden_sum   ? models.hidden_sum.get()
             : sel.method == SelectionMethod::hidden_max ? models.hidden_max.get()
                                                         : models.hidden_cat.get();
    if (variant == GridVariant::hybrid_el_cmp && !hidden)
      throw ConfigError("hidden-method model was not trained");
  }

  VariantResult res;
  res.variant = grid_variant_name(variant);
  res.selection = selection_method_name(sel.method);
  if (sel.expert_enabled) res.selection += "+expert";

  std::vector<std::vector<int>> predicted, gold;
  for (std::size_t pos = 0; pos < test_idx.size(); ++pos) {
    std::size_t k = test_idx[pos];
    const DAExample& ex = original[k];
    const std::vector<std::string>& completed_tokens =
        completions[pos].tokens.empty() ? ex.utterance : completions[pos].tokens;

    std::vector<int> decision;
    std::string path = "combined";
    switch (variant) {
      case GridVariant::el: {
        Prediction p = models.el_a->predict(ex.context, ex.utterance);
        decision = da_decide(p.D, sel.theta);
        path = "el";
        break;
      }
      case GridVariant::cmp: {
        Prediction p = models.cmp_a->predict(ex.context, completed_tokens);
        decision = da_decide(p.D, sel.theta);
        path = "cmp";
        break;
      }
      case GridVariant::hybrid_el_el: {
        Prediction a = models.el_a->predict(ex.context, ex.utterance);
        Prediction b = models.el_b->predict(ex.context, ex.utterance);
        SelectionConfig ens = sel;
        ens.expert_enabled = false;  // the expert rule is an EL-vs-CMP device
        decision = da_select(a, b, ens, nullptr);
        break;
      }
      case GridVariant::hybrid_cmp_cmp: {
        Prediction a = models.cmp_a->predict(ex.context, completed_tokens);
        Prediction b = models.cmp_b->predict(ex.context, completed_tokens);
        SelectionConfig ens = sel;
        ens.expert_enabled = false;
        decision = da_select(a, b, ens, nullptr);
        break;
      }
      case GridVariant::hybrid_el_cmp: {
        Prediction pe = models.el_a->predict(ex.context, ex.utterance);
        Prediction pc = models.cmp_a->predict(ex.context, completed_tokens);
        const CombinedHead* head = nullptr;
        if (hidden) {
          auto [he, hc] = hidden->pooled(ex.utterance, completed_tokens);
          pe.H = he;
          pc.H = hc;
          head = &hidden->head();
        }
        if (expert_fires(pe, sel)) {
          path = "expert";
          ++res.expert_short_circuits;
        }
        decision = da_select(pe, pc, sel, head);
        break;
      }
    }
    predicted.push_back(decision);
    gold.push_back(ex.labels);
    res.per_example.push_back(
        json{{"utterance", ex.utterance},
             {"completed", completed_tokens},
             {"gold", labels_to_names(ex.labels, acts)},
             {"predicted", labels_to_names(decision, acts)},
             {"path", path}});
  }
  res.n_examples = test_idx.size();
  res.micro = multilabel_prf(predicted, gold);
  res.macro = multilabel_prf_macro(predicted, gold, acts.size());
  return res;
}

namespace {

std::vector<SrlFrame> gold_frames(const SRLExample& ex) {
  std::vector<SrlFrame> out;
  for (const auto& ann : ex.frames) {
    SrlFrame fr = extract_frame(ann.tags, ann.predicate_source, ann.predicate_span);
    out.push_back(std::move(fr));
  }
  return out;
}

json frames_to_json(const std::vector<SrlFrame>& frames) {
  json arr = json::array();
  for (const auto& fr : frames) {
    json args = json::array();
    for (const auto& a : fr.args)
      args.push_back(json{{"role", a.role},
                          {"span", {a.start, a.end}},
                          {"context_side", a.context_side}});
    json fj{{"predicate_source",
             fr.predicate_source == PredicateSource::in_utterance ? "in_utterance"
                                                                  : "in_context"},
            {"args", args}};
    if (fr.predicate_span)
      fj["predicate_span"] = {fr.predicate_span->first, fr.predicate_span->second};
    arr.push_back(std::move(fj));
  }
  return arr;
}

}  // namespace

VariantResult run_srl_variant(GridVariant variant, SrlSelector selector, double tau,
                              SrlModels& models, const SRLCorpus& original,
                              const std::vector<AutoCompletion>& completions,
                              const std::vector<std::size_t>& test_idx) {
  if (variant == GridVariant::hybrid_el_el || variant == GridVariant::hybrid_cmp_cmp)
    throw ConfigError("SRL grid variants are EL, CMP and Hybrid-EL-CMP");

  VariantResult res;
  res.variant = grid_variant_name(variant);
  res.selection = variant == GridVariant::hybrid_el_cmp
                      ? (selector == SrlSelector::rule ? "rule" : "probability")
                      : "-";

  std::vector<std::vector<SrlFrame>> predicted, gold;
  for (std::size_t pos = 0; pos < test_idx.size(); ++pos) {
    std::size_t k = test_idx[pos];
    const SRLExample& ex = original[k];
    bool have_completion = !completions[pos].tokens.empty();
    const std::vector<std::string>& completed_tokens =
        have_completion ? completions[pos].tokens : ex.utterance;

    std::vector<SrlFrame> frames;
    std::string path = "el";
    if (variant == GridVariant::el) {
      frames = tag_utterance(*models.predid_el, *models.arg_el, ex.utterance);
    } else {
      std::vector<SrlFrame> frames_c =
          tag_utterance(*models.predid_cmp, *models.arg_cmp, completed_tokens);
      std::vector<int> alignment = align(ex.utterance, completed_tokens);
      if (variant == GridVariant::cmp) {
        frames = project_frames(frames_c, alignment);
        path = "cmp";
      } else {
        std::vector<SrlFrame> frames_e =
            tag_utterance(*models.predid_el, *models.arg_el, ex.utterance);
        if (selector == SrlSelector::rule) {
          frames = srl_select_rule(frames_e, frames_c, alignment);
          path = has_predicate(frames_e) ? "rule_original" : "rule_completed";
        } else {
          BeamHypothesis beam;
          beam.posteriors = have_completion
                                ? completions[pos].posteriors
                                : std::vector<double>(completed_tokens.size(), 1.0);
          beam.tokens.assign(completed_tokens.size(), Vocabulary::kUnk);
          frames = srl_select_probability(frames_e, frames_c, beam, alignment, tau);
          path = "probability";
        }
      }
    }
    predicted.push_back(frames);
    gold.push_back(gold_frames(ex));
    res.per_example.push_back(json{{"utterance", ex.utterance},
                                   {"completed", completed_tokens},
                                   {"gold", frames_to_json(gold.back())},
                                   {"predicted", frames_to_json(frames)},
                                   {"path", path}});
  }
  res.n_examples = test_idx.size();
  res.micro = srl_span_prf(predicted, gold, SrlScoringMode::modified);
  res.macro = srl_span_prf(predicted, gold, SrlScoringMode::standard);
  return res;
}

double sweep_tau(SrlModels& models, const SRLCorpus& original,
                 const std::vector<AutoCompletion>& completions_val,
                 const std::vector<std::size_t>& val_idx,
                 std::span<const double> candidates) {
  double best_tau = candidates.empty() ? 0.5 : candidates[0];
  double best_f1 = -1.0;
  for (double tau : candidates) {
    VariantResult r = run_srl_variant(GridVariant::hybrid_el_cmp,
                                      SrlSelector::probability, tau, models, original,
                                      completions_val, val_idx);
    if (r.micro.f1 > best_f1) {
      best_f1 = r.micro.f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

json make_report(const RunConfig& cfg, const std::string& task,
                 const VariantResult& result,
                 const std::vector<std::pair<std::string, std::string>>& corpus_hashes) {
  json hashes = json::object();
  for (const auto& [name, hash] : corpus_hashes) hashes[name] = hash;
  json metrics{{"precision", result.micro.precision},
               {"recall", result.micro.recall},
               {"f1", result.micro.f1}};
  json secondary{{"precision", result.macro.precision},
                 {"recall", result.macro.recall},
                 {"f1", result.macro.f1}};
  return json{{"task", task},
              {"variant", result.variant},
              {"selection", result.selection},
              {"config", cfg.to_json()},
              {"corpus_hashes", hashes},
              {"metrics", metrics},
              {task == "srl" ? "metrics_standard_mode" : "metrics_macro", secondary},
              {"expert_short_circuits", result.expert_short_circuits},
              {"n_examples", result.n_examples},
              {"per_example", result.per_example}};
}

void write_report(const std::string& path, const json& report) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write report: " + path);
  os << report.dump(2) << "\n";
}

}  // namespace elcmp
