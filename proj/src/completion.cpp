#include "elcmp/completion.hpp"

#include <algorithm>
#include <cmath>

namespace elcmp {

namespace {

void require_distribution(const Tensor& x, const char* what) {
  double sum = 0.0;
  for (double v : x.v) sum += v;
  if (std::abs(sum - 1.0) > 1e-6)
    throw ShapeError(std::string("mixture: ") + what + " is not normalized (sum " +
                     std::to_string(sum) + ")");
}

}  // namespace

Tape::Var mixture(Tape& t, Tape::Var lambda, Tape::Var p_gen, Tape::Var att,
                  const std::vector<int>& copy_ext_ids, std::size_t ext_size,
                  MixtureMode mode) {
  require_distribution(t.val(p_gen), "p_gen");
  require_distribution(t.val(att), "attention");
  if (copy_ext_ids.size() != t.val(att).size())
    throw ShapeError("mixture: copy map length does not match attention length");

  Tape::Var lam_c = t.one_minus(lambda);
  if (mode == MixtureMode::additive) {
    Tape::Var gen_part = t.pad_to(t.scale(p_gen, lambda), ext_size);
    Tape::Var copy_part =
        t.scatter_merge(t.scale(att, lam_c), copy_ext_ids, ext_size);
    return t.add(gen_part, copy_part);
  }
  // Literal softmax-concat form: softmax over the two scaled blocks, then
  // per-word merging of generation and copy slots.
  std::size_t base = t.val(p_gen).size();
  Tape::Var z = t.concat2(t.scale(p_gen, lambda), t.scale(att, lam_c));
  Tape::Var q = t.softmax(z);
  std::vector<int> slot_map(base + copy_ext_ids.size());
  for (std::size_t i = 0; i < base; ++i) slot_map[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < copy_ext_ids.size(); ++i)
    slot_map[base + i] = copy_ext_ids[i];
  return t.scatter_merge(q, std::move(slot_map), ext_size);
}

CompletionModel::CompletionModel(CompletionConfig cfg, Vocabulary vocab, uint64_t seed)
    : cfg_(cfg),
      vocab_(std::move(vocab)),
      embed_("embed", {vocab_.size(), cfg.embed_dim}),
      encoder_("enc", cfg.embed_dim, cfg.hidden, cfg.enc_layers),
      att_ws_("att.ws", {cfg.attn_dim, cfg.hidden}),
      att_wh_("att.wh", {cfg.attn_dim, 2 * cfg.hidden}),
      att_v_("att.v", {1, cfg.attn_dim}),
      gen_w_("gen.w", {vocab_.size(), 3 * cfg.hidden}),
      gen_b_("gen.b", {vocab_.size()}),
      lam_w_("lam.w", {1, 2 * cfg.hidden + cfg.embed_dim + cfg.hidden}),
      lam_b_("lam.b", {1}) {
  for (std::size_t l = 0; l < cfg.dec_layers; ++l) {
    // layer 0 consumes the token embedding plus the previous attention
    // context (input feeding), which is what lets copying track positions
    std::size_t in = l == 0 ? cfg.embed_dim + 2 * cfg.hidden : cfg.hidden;
    decoder_.emplace_back("dec" + std::to_string(l), in, cfg.hidden);
    bridge_h_w_.emplace_back("bridge.h" + std::to_string(l) + ".w",
                             std::vector<std::size_t>{cfg.hidden, 2 * cfg.hidden});
    bridge_h_b_.emplace_back("bridge.h" + std::to_string(l) + ".b",
                             std::vector<std::size_t>{cfg.hidden});
    bridge_c_w_.emplace_back("bridge.c" + std::to_string(l) + ".w",
                             std::vector<std::size_t>{cfg.hidden, 2 * cfg.hidden});
    bridge_c_b_.emplace_back("bridge.c" + std::to_string(l) + ".b",
                             std::vector<std::size_t>{cfg.hidden});
  }
  Rng rng = Rng::substream(seed, "completion-init");
  for (auto* p : params()) p->init_xavier(rng);
  gen_b_.value.fill(0.0);
  lam_b_.value.fill(0.0);
}

std::vector<Parameter*> CompletionModel::params() {
  std::vector<Parameter*> out{&embed_};
  encoder_.collect(out);
  for (auto& l : decoder_) l.collect(out);
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    out.push_back(&bridge_h_w_[l]);
    out.push_back(&bridge_h_b_[l]);
    out.push_back(&bridge_c_w_[l]);
    out.push_back(&bridge_c_b_[l]);
  }
  out.push_back(&att_ws_);
  out.push_back(&att_wh_);
  out.push_back(&att_v_);
  out.push_back(&gen_w_);
  out.push_back(&gen_b_);
  out.push_back(&lam_w_);
  out.push_back(&lam_b_);
  return out;
}

Tape::Var CompletionModel::embed_token(Tape& t, int ext_id) {
  // Copy-only temporary ids have no embedding row; they are fed as UNK.
  std::size_t row = ext_id < static_cast<int>(vocab_.size())
                        ? static_cast<std::size_t>(ext_id)
                        : static_cast<std::size_t>(Vocabulary::kUnk);
  return t.lookup(embed_, row);
}

CompletionModel::EncodedInput CompletionModel::encode(Tape& t,
                                                      const std::vector<int>& ids,
                                                      bool training, Rng& rng) {
  if (ids.empty()) throw ShapeError("encode: empty source sequence");
  std::vector<Tape::Var> inputs;
  inputs.reserve(ids.size());
  for (int id : ids) inputs.push_back(t.lookup(embed_, id));
  EncoderOut enc = encoder_.encode(t, inputs, cfg_.dropout, rng, training);

  EncodedInput out;
  out.keys = enc.seq;
  out.wh.reserve(out.keys.size());
  for (Tape::Var k : out.keys) out.wh.push_back(t.affine(k, att_wh_, nullptr));
  for (std::size_t l = 0; l < cfg_.dec_layers; ++l) {
    std::size_t el = std::min(l, cfg_.enc_layers - 1);
    Tape::Var hcat = t.concat2(enc.final_h_fwd[el], enc.final_h_bwd[el]);
    Tape::Var ccat = t.concat2(enc.final_c_fwd[el], enc.final_c_bwd[el]);
    out.state.h.push_back(t.tanh_(t.affine(hcat, bridge_h_w_[l], &bridge_h_b_[l])));
    out.state.c.push_back(t.tanh_(t.affine(ccat, bridge_c_w_[l], &bridge_c_b_[l])));
  }
  out.state.ctx = t.input(Tensor({2 * cfg_.hidden}));
  return out;
}

DecoderStepOutput CompletionModel::decode_step(Tape& t, int prev_ext_id,
                                               const DecoderState& state,
                                               const EncodedInput& enc,
                                               const std::vector<int>& copy_ext_ids,
                                               std::size_t ext_size, bool training,
                                               Rng& rng) {
  if (prev_ext_id < 0 || static_cast<std::size_t>(prev_ext_id) >= ext_size)
    throw ShapeError("decode_step: unknown token id " + std::to_string(prev_ext_id));
  Tape::Var x = embed_token(t, prev_ext_id);
  DecoderStepOutput out;
  Tape::Var layer_in = t.concat2(x, state.ctx);
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    if (l > 0) layer_in = t.dropout(layer_in, cfg_.dropout, rng, training);
    auto [h, c] = decoder_[l].step(t, layer_in, state.h[l], state.c[l]);
    out.state.h.push_back(h);
    out.state.c.push_back(c);
    layer_in = h;
  }
  Tape::Var s = out.state.h.back();

  // additive attention over the encoder outputs
  Tape::Var u = t.affine(s, att_ws_, nullptr);
  std::vector<Tape::Var> scores;
  scores.reserve(enc.keys.size());
  for (std::size_t i = 0; i < enc.keys.size(); ++i)
    scores.push_back(t.affine(t.tanh_(t.add(u, enc.wh[i])), att_v_, nullptr));
  out.att = t.softmax(t.stack(scores));
  Tape::Var ctx = t.blend(out.att, enc.keys);
  out.state.ctx = ctx;

  out.lambda = t.sigmoid(t.affine(t.concat3(ctx, x, s), lam_w_, &lam_b_));
  out.p_gen = t.softmax(t.affine(t.concat2(ctx, s), gen_w_, &gen_b_));
  if (cfg_.use_copy) {
    out.p = mixture(t, out.lambda, out.p_gen, out.att, copy_ext_ids, ext_size,
                    cfg_.mixture);
  } else {
    out.p = out.p_gen;
  }
  return out;
}

double CompletionModel::example_loss(const CompletionExample& ex, bool with_grad,
                                     Rng& rng, bool training) {
  EncodedSource src = encode_example(ex);
  std::size_t ext_size = cfg_.use_copy ? src.ext.size() : vocab_.size();

  std::vector<int> targets;
  targets.reserve(ex.reference.size() + 1);
  for (const auto& tok : ex.reference) {
    int id = cfg_.use_copy ? src.ext.id(tok) : vocab_.id(tok);
    if (id == Vocabulary::kUnk && tok != "<unk>") ++unk_reference_tokens_;
    targets.push_back(id);
  }
  targets.push_back(Vocabulary::kEos);

  Tape t;
  EncodedInput enc = encode(t, src.ids, training, rng);
  DecoderState state = enc.state;
  std::vector<Tape::Var> losses;
  losses.reserve(targets.size());
  int prev = Vocabulary::kSos;
  for (int target : targets) {
    DecoderStepOutput step = decode_step(t, prev, state, enc, src.copy_ids, ext_size,
                                         training, rng);
    losses.push_back(t.neg_log_pick(step.p, static_cast<std::size_t>(target)));
    state = std::move(step.state);
    prev = target;  // teacher forcing
  }
  Tape::Var loss = t.scale_const(t.sum_scalars(losses),
                                 1.0 / static_cast<double>(targets.size()));
  if (with_grad) t.backward(loss);
  return t.val(loss).v[0];
}

namespace {

// PAD and SOS are never legal outputs; candidate selection skips them.
bool selectable(int id) { return id != Vocabulary::kPad && id != Vocabulary::kSos; }

}  // namespace

DecodeResult CompletionModel::greedy_decode(const std::vector<DialogTurn>& context,
                                            const std::vector<std::string>& source,
                                            std::size_t max_len) {
  CompletionExample ex;
  ex.context = context;
  ex.source = source;
  ex.reference = source;  // unused during decoding
  EncodedSource src = encode_example(ex);
  std::size_t ext_size = cfg_.use_copy ? src.ext.size() : vocab_.size();

  Rng rng(0);  // eval mode: no dropout draws
  Tape t;
  EncodedInput enc = encode(t, src.ids, false, rng);
  DecoderState state = enc.state;
  DecodeResult out;
  int prev = Vocabulary::kSos;
  for (std::size_t step_i = 0; step_i < max_len; ++step_i) {
    DecoderStepOutput step =
        decode_step(t, prev, state, enc, src.copy_ids, ext_size, false, rng);
    const Tensor& p = t.val(step.p);
    int best = -1;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (selectable(static_cast<int>(i)) && (best < 0 || p.v[i] > p.v[best]))
        best = static_cast<int>(i);
    out.lambdas.push_back(t.val(step.lambda).v[0]);
    if (best == Vocabulary::kEos) break;
    out.tokens.push_back(cfg_.use_copy ? src.ext.token(best) : vocab_.token(best));
    out.posteriors.push_back(p.v[best]);
    state = std::move(step.state);
    prev = best;
  }
  return out;
}

std::vector<BeamHypothesis> CompletionModel::beam_decode(
    const std::vector<DialogTurn>& context, const std::vector<std::string>& source,
    std::size_t beam_k, std::size_t max_len) {
  if (beam_k == 0) throw ShapeError("beam_decode: k must be >= 1");
  CompletionExample ex;
  ex.context = context;
  ex.source = source;
  ex.reference = source;
  EncodedSource src = encode_example(ex);
  std::size_t ext_size = cfg_.use_copy ? src.ext.size() : vocab_.size();

  Rng rng(0);
  Tape t;
  EncodedInput enc = encode(t, src.ids, false, rng);

  struct Live {
    BeamHypothesis hyp;
    DecoderState state;
    int prev;
  };
  std::vector<Live> live{{BeamHypothesis{}, enc.state, Vocabulary::kSos}};
  std::vector<BeamHypothesis> finished;

  for (std::size_t step_i = 0; step_i < max_len && !live.empty(); ++step_i) {
    std::vector<Live> candidates;
    for (auto& cur : live) {
      DecoderStepOutput step =
          decode_step(t, cur.prev, cur.state, enc, src.copy_ids, ext_size, false, rng);
      const Tensor& p = t.val(step.p);
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!selectable(static_cast<int>(i))) continue;
        Live next;
        next.hyp = cur.hyp;
        next.hyp.tokens.push_back(static_cast<int>(i));
        next.hyp.posteriors.push_back(p.v[i]);
        next.hyp.score += std::log(std::max(p.v[i], 1e-300));
        next.hyp.finished = static_cast<int>(i) == Vocabulary::kEos;
        if (!next.hyp.finished) next.state = step.state;
        next.prev = static_cast<int>(i);
        candidates.push_back(std::move(next));
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Live& a, const Live& b) { return a.hyp.score > b.hyp.score; });
    live.clear();
    for (auto& c : candidates) {
      if (c.hyp.finished)
        finished.push_back(std::move(c.hyp));
      else if (live.size() < beam_k)
        live.push_back(std::move(c));
      if (live.size() >= beam_k && finished.size() >= beam_k) break;
    }
  }
  for (auto& l : live) finished.push_back(std::move(l.hyp));  // ran out of length
  std::stable_sort(finished.begin(), finished.end(),
                   [](const BeamHypothesis& a, const BeamHypothesis& b) {
                     return a.normalized_score() > b.normalized_score();
                   });
  if (finished.size() > beam_k) finished.resize(beam_k);
  return finished;
}

std::vector<std::string> CompletionModel::surface(const BeamHypothesis& hyp,
                                                  const ExtendedVocab& ext) const {
  std::vector<std::string> out;
  for (int id : hyp.tokens) {
    if (id == Vocabulary::kEos) break;
    out.push_back(cfg_.use_copy ? ext.token(id) : vocab_.token(id));
  }
  return out;
}

CompletionTrainReport train_completion(
    CompletionModel& model, const CompletionCorpus& corpus,
    const std::vector<std::size_t>& train_idx, const OptimizerConfig& opt,
    std::size_t epochs, uint64_t seed,
    const std::function<bool(std::size_t, double)>& after_epoch) {
  CompletionTrainReport report;
  Optimizer optimizer(opt);
  Rng shuffle_rng = Rng::substream(seed, "completion-shuffle");
  Rng dropout_rng = Rng::substream(seed, "completion-dropout");
  auto params = model.params();
  std::vector<std::size_t> order = train_idx;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    double total = 0.0;
    for (std::size_t idx : order) {
      for (auto* p : params) p->zero_grad();
      total += model.example_loss(corpus[idx], true, dropout_rng);
      optimizer.step(params);
      ++report.steps;
    }
    double mean = order.empty() ? 0.0 : total / static_cast<double>(order.size());
    report.epoch_mean_nll.push_back(mean);
    optimizer.end_epoch();
    if (after_epoch && after_epoch(epoch, mean)) break;
  }
  report.unk_reference_tokens = model.unk_reference_tokens();
  return report;
}

}  // namespace elcmp
