// elcmp command line: synthetic data generation, model training, utterance
// completion, the baseline grid, and metric evaluation.
//
// Exit codes: 0 success, 2 usage/config error, 1 runtime failure.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "elcmp/checkpoint.hpp"
#include "elcmp/experiment.hpp"
#include "elcmp/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace elcmp;

namespace {

std::string data_path(const std::string& dir, const char* file) {
  return (fs::path(dir) / file).string();
}

std::string default_data_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("ELHYB_DATA_DIR")) return env;
  return ".";
}

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return RunConfig::load(path);
}

struct TrainedCompletion {
  std::unique_ptr<CompletionModel> model;
  CompletionTrainReport report;
};

Vocabulary completion_vocab(const CompletionCorpus& corpus,
                            const std::vector<std::size_t>& train_idx,
                            std::size_t min_count) {
  std::vector<std::vector<std::string>> sentences;
  for (std::size_t k : train_idx) {
    for (const auto& turn : corpus[k].context) sentences.push_back(turn.tokens);
    sentences.push_back(corpus[k].source);
    sentences.push_back(corpus[k].reference);
  }
  return Vocabulary::build(sentences, min_count);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

TrainedCompletion train_completion_from_config(const RunConfig& cfg,
                                               const CompletionCorpus& corpus,
                                               const std::vector<std::size_t>& train_idx) {
  TrainedCompletion out;
  Vocabulary vocab = completion_vocab(corpus, train_idx, cfg.completion_min_count);
  out.model = std::make_unique<CompletionModel>(cfg.completion, std::move(vocab),
                                                cfg.seed);
  out.report = train_completion(*out.model, corpus, train_idx, cfg.completion_opt,
                                cfg.completion_epochs, cfg.seed);
  return out;
}

json train_report_json(const std::vector<double>& losses, std::size_t steps) {
  return json{{"epoch_mean_loss", losses}, {"steps", steps}};
}

int run_gen_data(const RunConfig& cfg, const std::string& dir, bool force) {
  fs::create_directories(dir);
  auto exists = [&](const char* f) { return fs::exists(data_path(dir, f)); };
  const char* files[] = {"completion.jsonl", "da.jsonl", "da_completed.jsonl",
                         "srl.jsonl", "srl_completed.jsonl", "da_labels.txt",
                         "srl_roles.txt"};
  if (!force)
    for (const char* f : files)
      if (exists(f)) {
        std::cerr << "refusing to overwrite " << data_path(dir, f)
                  << " (use --force)\n";
        return 2;
      }
  SyntheticCorpora corpora = generate_synthetic(cfg.seed, cfg.gen_n, cfg.mix);
  LabelInventory acts = default_act_inventory();
  save_completion_jsonl(data_path(dir, "completion.jsonl"), corpora.completion);
  save_da_jsonl(data_path(dir, "da.jsonl"), corpora.da, acts);
  save_da_jsonl(data_path(dir, "da_completed.jsonl"), corpora.da_completed, acts);
  save_srl_jsonl(data_path(dir, "srl.jsonl"), corpora.srl);
  save_srl_jsonl(data_path(dir, "srl_completed.jsonl"), corpora.srl_completed);
  {
    std::ofstream os(data_path(dir, "da_labels.txt"), std::ios::trunc);
    for (const auto& name : acts.names()) os << name << "\n";
  }
  {
    std::ofstream os(data_path(dir, "srl_roles.txt"), std::ios::trunc);
    for (const auto& role : default_srl_roles()) os << role << "\n";
  }
  std::cout << "wrote " << corpora.completion.size() << " examples per corpus to "
            << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid ellipsis/completion language understanding pipeline"};
  app.require_subcommand(1);

  std::string config_path, data_dir_flag, out_path, report_path, models_dir;
  bool force = false;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpora");
  uint64_t gen_seed = 1;
  std::size_t gen_n = 2000;
  std::vector<double> gen_mix;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--n", gen_n, "examples per corpus");
  gen->add_option("--mix", gen_mix,
                  "proportions: had_ellipsis modified_to_ellipsis already_complete")
      ->expected(3);
  gen->add_option("--out", data_dir_flag, "output directory (default $ELHYB_DATA_DIR)");
  gen->add_flag("--force", force, "overwrite existing corpora");

  // train-completion
  auto* tc = app.add_subcommand("train-completion", "train the completion model");
  tc->add_option("--config", config_path, "run config file");
  tc->add_option("--data", data_dir_flag, "corpus directory");
  tc->add_option("--out", out_path, "checkpoint path")->required();
  tc->add_option("--report", report_path, "training report JSON");

  // complete
  auto* cm = app.add_subcommand("complete", "complete utterances from JSONL");
  std::string ckpt_path, in_path, complete_out;
  std::size_t complete_beam = 0;
  cm->add_option("--model", ckpt_path, "completion checkpoint")->required();
  cm->add_option("--config", config_path, "run config file");
  cm->add_option("--in", in_path, "input JSONL (context + source)")->required();
  cm->add_option("--out", complete_out, "output JSONL (default stdout)");
  cm->add_option("--beam", complete_beam, "beam width (0 = greedy)");

  // train-da / train-srl
  auto* td = app.add_subcommand("train-da", "train the dialog-act members");
  td->add_option("--config", config_path, "run config file");
  td->add_option("--data", data_dir_flag, "corpus directory");
  td->add_option("--models", models_dir, "model output directory")->required();
  td->add_option("--report", report_path, "training report JSON");

  auto* ts = app.add_subcommand("train-srl", "train the SRL taggers");
  ts->add_option("--config", config_path, "run config file");
  ts->add_option("--data", data_dir_flag, "corpus directory");
  ts->add_option("--models", models_dir, "model output directory")->required();
  ts->add_option("--report", report_path, "training report JSON");

  // run-grid
  auto* rg = app.add_subcommand("run-grid", "run baseline grid variants");
  std::string task = "da", variant = "all", selection_name;
  rg->add_option("--task", task, "da | srl")->check(CLI::IsMember({"da", "srl"}));
  rg->add_option("--variant", variant,
                 "el | cmp | hybrid-el-el | hybrid-cmp-cmp | hybrid-el-cmp | all");
  rg->add_option("--selection", selection_name,
                 "selection method (da: logits/hidden methods; srl: rule | probability)");
  rg->add_option("--config", config_path, "run config file");
  rg->add_option("--data", data_dir_flag, "corpus directory");
  rg->add_option("--models", models_dir, "model directory")->required();
  rg->add_option("--out", out_path, "report output directory")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a predictions file");
  std::string gold_path, pred_path, eval_task = "completion";
  bool per_example = false;
  ev->add_option("--task", eval_task, "completion | da | srl")
      ->check(CLI::IsMember({"completion", "da", "srl"}));
  ev->add_option("--gold", gold_path, "gold JSONL")->required();
  ev->add_option("--pred", pred_path, "prediction JSONL")->required();
  ev->add_option("--out", report_path, "metric report JSON (default stdout)");
  ev->add_flag("--per-example", per_example, "include a per-example breakdown");
  ev->add_option("--data", data_dir_flag, "corpus directory (label inventory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = load_config_or_default(config_path);
    std::string dir = default_data_dir(data_dir_flag);

    if (gen->parsed()) {
      cfg.seed = gen_seed;
      cfg.gen_n = gen_n;
      if (!gen_mix.empty()) {
        cfg.mix.had_ellipsis = gen_mix[0];
        cfg.mix.modified_to_ellipsis = gen_mix[1];
        cfg.mix.already_complete = gen_mix[2];
      }
      try {
        return run_gen_data(cfg, dir, force);
      } catch (const CorpusError& e) {
        std::cerr << "error: --mix: " << e.what() << "\n";
        return 2;
      }
    }

    if (tc->parsed()) {
      CompletionCorpus corpus =
          load_completion_jsonl(data_path(dir, "completion.jsonl"));
      KFoldSplit split = kfold_split(corpus.size(), cfg.kfold_k, cfg.seed,
                                     std::min(cfg.test_count, corpus.size() / 5));
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < corpus.size(); ++i)
        if (std::find(split.test.begin(), split.test.end(), i) == split.test.end())
          train_idx.push_back(i);
      TrainedCompletion trained = train_completion_from_config(cfg, corpus, train_idx);
      auto params = trained.model->params();
      save_checkpoint(out_path, params);
      trained.model->vocab().save(out_path + ".vocab");
      CompletionEval eval = evaluate_completion(*trained.model, corpus, split.test);
      json report{{"config", cfg.to_json()},
                  {"corpus_hashes",
                   {{"completion.jsonl",
                     git_blob_sha1_file(data_path(dir, "completion.jsonl"))}}},
                  {"train", train_report_json(trained.report.epoch_mean_nll,
                                              trained.report.steps)},
                  {"unk_reference_tokens", trained.report.unk_reference_tokens},
                  {"heldout",
                   {{"bleu", eval.bleu},
                    {"em", eval.em},
                    {"precision", eval.word.precision},
                    {"recall", eval.word.recall},
                    {"f1", eval.word.f1}}}};
      if (!report_path.empty()) write_report(report_path, report);
      std::cout << "heldout em=" << eval.em << " bleu=" << eval.bleu << "\n";
      return 0;
    }

    if (cm->parsed()) {
      CompletionCorpus inputs = load_completion_jsonl(in_path);
      // Rebuild the model around the saved vocabulary, then load weights.
      Vocabulary vocab = Vocabulary::load(ckpt_path + ".vocab");
      CompletionModel model(cfg.completion, std::move(vocab), cfg.seed);
      auto params = model.params();
      load_checkpoint(ckpt_path, params);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!complete_out.empty()) {
        file.open(complete_out, std::ios::trunc);
        os = &file;
      }
      for (const auto& ex : inputs) {
        json line;
        if (complete_beam == 0) {
          DecodeResult dec = model.greedy_decode(ex.context, ex.source,
                                                 cfg.completion.max_decode_len);
          line = json{{"tokens", dec.tokens},
                      {"posteriors", dec.posteriors},
                      {"lambdas", dec.lambdas}};
        } else {
          auto beams = model.beam_decode(ex.context, ex.source, complete_beam,
                                         cfg.completion.max_decode_len);
          EncodedSource src = model.encode_example(ex);
          json hyps = json::array();
          for (const auto& h : beams)
            hyps.push_back(json{{"tokens", model.surface(h, src.ext)},
                                {"posteriors", h.posteriors},
                                {"score", h.normalized_score()}});
          line = json{{"hypotheses", hyps}};
        }
        (*os) << line.dump() << "\n";
      }
      return 0;
    }

    if (td->parsed() || ts->parsed() || rg->parsed()) {
      fs::create_directories(models_dir.empty() ? "." : models_dir);
      LabelInventory acts = LabelInventory::load(data_path(dir, "da_labels.txt"));

      if (td->parsed()) {
        DACorpus da = load_da_jsonl(data_path(dir, "da.jsonl"), acts);
        DACorpus da_c = load_da_jsonl(data_path(dir, "da_completed.jsonl"), acts);
        KFoldSplit split = kfold_split(da.size(), cfg.kfold_k, cfg.seed,
                                       std::min(cfg.test_count, da.size() / 5));
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < da.size(); ++i)
          if (std::find(split.test.begin(), split.test.end(), i) == split.test.end())
            train_idx.push_back(i);
        DAModels models = train_da_models(da, da_c, train_idx, acts, cfg.da,
                                          cfg.da_opt, cfg.da_epochs, cfg.seed);
        auto save = [&](DAClassifier& m, const char* f) {
          auto ps = m.params();
          save_checkpoint(data_path(models_dir, f), ps);
        };
        save(*models.el_a, "da_el_a.ckpt");
        save(*models.el_b, "da_el_b.ckpt");
        save(*models.cmp_a, "da_cmp_a.ckpt");
        save(*models.cmp_b, "da_cmp_b.ckpt");
        for (auto* hm :
             {models.hidden_sum.get(), models.hidden_max.get(), models.hidden_cat.get()}) {
          auto ps = hm->params();
          save_checkpoint(
              data_path(models_dir, (std::string("da_") +
                                     selection_method_name(hm->method()) + ".ckpt")
                                        .c_str()),
              ps);
        }
        models.vocab.save(data_path(models_dir, "da.vocab"));
        if (!report_path.empty())
          write_report(report_path, json{{"config", cfg.to_json()},
                                         {"trained",
                                          {"da_el_a", "da_el_b", "da_cmp_a", "da_cmp_b",
                                           "da_hidden_sum", "da_hidden_max",
                                           "da_hidden_cat"}}});
        std::cout << "trained 7 dialog-act members into " << models_dir << "\n";
        return 0;
      }

      if (ts->parsed()) {
        SRLCorpus srl = load_srl_jsonl(data_path(dir, "srl.jsonl"));
        SRLCorpus srl_c = load_srl_jsonl(data_path(dir, "srl_completed.jsonl"));
        std::vector<std::string> roles;
        {
          std::ifstream is(data_path(dir, "srl_roles.txt"));
          std::string line;
          while (std::getline(is, line))
            if (!line.empty()) roles.push_back(line);
        }
        KFoldSplit split = kfold_split(srl.size(), cfg.kfold_k, cfg.seed,
                                       std::min(cfg.test_count, srl.size() / 5));
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < srl.size(); ++i)
          if (std::find(split.test.begin(), split.test.end(), i) == split.test.end())
            train_idx.push_back(i);
        SrlModels models = train_srl_models(srl, srl_c, train_idx, roles, cfg.srl,
                                            cfg.srl_opt, cfg.srl_epochs, cfg.seed);
        for (auto& [tagger, file] :
             std::initializer_list<std::pair<SRLTagger*, const char*>>{
                 {models.predid_el.get(), "predid_el.ckpt"},
                 {models.arg_el.get(), "srl_el.ckpt"},
                 {models.predid_cmp.get(), "predid_cmp.ckpt"},
                 {models.arg_cmp.get(), "srl_cmp.ckpt"}}) {
          auto ps = tagger->params();
          save_checkpoint(data_path(models_dir, file), ps);
        }
        models.predid_el->vocab().save(data_path(models_dir, "srl.vocab"));
        if (!report_path.empty())
          write_report(report_path,
                       json{{"config", cfg.to_json()},
                            {"trained",
                             {"predid_el", "srl_el", "predid_cmp", "srl_cmp"}}});
        std::cout << "trained 4 SRL taggers into " << models_dir << "\n";
        return 0;
      }

      // run-grid: loads the checkpoints written by train-completion /
      // train-da / train-srl, writes one report per variant.
      auto require_file = [&](const char* f) {
        std::string p = data_path(models_dir, f);
        if (!fs::exists(p)) throw ConfigError("missing checkpoint: " + p);
        return p;
      };
      require_file("completion.ckpt");
      Vocabulary cvocab = Vocabulary::load(data_path(models_dir, "completion.ckpt.vocab"));
      CompletionModel cmodel(cfg.completion, std::move(cvocab), cfg.seed);
      auto cparams = cmodel.params();
      load_checkpoint(data_path(models_dir, "completion.ckpt"), cparams);

      std::vector<std::pair<std::string, std::string>> hashes;
      for (const char* f : {"completion.jsonl", "da.jsonl", "da_completed.jsonl",
                            "srl.jsonl", "srl_completed.jsonl"})
        hashes.emplace_back(f, git_blob_sha1_file(data_path(dir, f)));

      std::vector<GridVariant> variants;
      if (variant == "all") {
        if (task == "da")
          variants = {GridVariant::el, GridVariant::cmp, GridVariant::hybrid_el_el,
                      GridVariant::hybrid_cmp_cmp, GridVariant::hybrid_el_cmp};
        else
          variants = {GridVariant::el, GridVariant::cmp, GridVariant::hybrid_el_cmp};
      } else {
        variants = {grid_variant_from_name(variant)};
      }

      fs::create_directories(out_path);
      if (task == "da") {
        DACorpus da = load_da_jsonl(data_path(dir, "da.jsonl"), acts);
        DACorpus da_c = load_da_jsonl(data_path(dir, "da_completed.jsonl"), acts);
        KFoldSplit split = kfold_split(da.size(), cfg.kfold_k, cfg.seed,
                                       std::min(cfg.test_count, da.size() / 5));
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < da.size(); ++i)
          if (std::find(split.test.begin(), split.test.end(), i) == split.test.end())
            train_idx.push_back(i);
        (void)da_c;
        (void)train_idx;
        if (!selection_name.empty()) cfg.selection_method = selection_name;
        SelectionConfig sel = cfg.selection(acts);
        DAModels models;
        models.vocab = Vocabulary::load(data_path(models_dir, "da.vocab"));
        auto load_da = [&](const char* file, const std::string& name) {
          auto clf = std::make_unique<DAClassifier>(cfg.da, models.vocab, acts.size(),
                                                    cfg.seed, name);
          auto ps = clf->params();
          load_checkpoint(require_file(file), ps);
          return clf;
        };
        models.el_a = load_da("da_el_a.ckpt", "da_el_a");
        models.el_b = load_da("da_el_b.ckpt", "da_el_b");
        models.cmp_a = load_da("da_cmp_a.ckpt", "da_cmp_a");
        models.cmp_b = load_da("da_cmp_b.ckpt", "da_cmp_b");
        auto load_hidden = [&](SelectionMethod m, const char* file) {
          auto hm = std::make_unique<HybridHiddenModel>(cfg.da, models.vocab,
                                                        acts.size(), m, cfg.seed);
          auto ps = hm->params();
          load_checkpoint(require_file(file), ps);
          return hm;
        };
        models.hidden_sum = load_hidden(SelectionMethod::hidden_sum, "da_hidden_sum.ckpt");
        models.hidden_max = load_hidden(SelectionMethod::hidden_max, "da_hidden_max.ckpt");
        models.hidden_cat = load_hidden(SelectionMethod::hidden_cat, "da_hidden_cat.ckpt");
        CompletionCorpus da_as_completion;
        for (const auto& ex : da) {
          CompletionExample ce;
          ce.context = ex.context;
          ce.source = ex.utterance;
          ce.reference = ex.utterance;
          ce.completion_case = CompletionCase::already_complete;
          da_as_completion.push_back(std::move(ce));
        }
        auto completions = auto_complete(cmodel, da_as_completion, split.test,
                                         cfg.beam_k);
        for (GridVariant v : variants) {
          VariantResult res =
              run_da_variant(v, sel, models, da, completions, split.test, acts);
          std::string file = std::string("da_") + res.variant + ".json";
          write_report(data_path(out_path, file.c_str()),
                       make_report(cfg, "da", res, hashes));
          std::cout << res.variant << " f1=" << res.micro.f1 << "\n";
        }
      } else {
        SRLCorpus srl = load_srl_jsonl(data_path(dir, "srl.jsonl"));
        SRLCorpus srl_c = load_srl_jsonl(data_path(dir, "srl_completed.jsonl"));
        std::vector<std::string> roles;
        {
          std::ifstream is(data_path(dir, "srl_roles.txt"));
          std::string line;
          while (std::getline(is, line))
            if (!line.empty()) roles.push_back(line);
        }
        (void)srl_c;
        KFoldSplit split = kfold_split(srl.size(), cfg.kfold_k, cfg.seed,
                                       std::min(cfg.test_count, srl.size() / 5));
        Vocabulary svocab = Vocabulary::load(data_path(models_dir, "srl.vocab"));
        TagSet arg_tags = TagSet::for_roles(roles);
        TagSet v_tags = TagSet::for_roles({"V"});
        auto load_tagger = [&](const char* file, const TagSet& tags,
                               const std::string& name) {
          auto tg = std::make_unique<SRLTagger>(cfg.srl, svocab, tags, cfg.seed, name);
          auto ps = tg->params();
          load_checkpoint(require_file(file), ps);
          return tg;
        };
        SrlModels models;
        models.predid_el = load_tagger("predid_el.ckpt", v_tags, "predid_el");
        models.arg_el = load_tagger("srl_el.ckpt", arg_tags, "srl_el");
        models.predid_cmp = load_tagger("predid_cmp.ckpt", v_tags, "predid_cmp");
        models.arg_cmp = load_tagger("srl_cmp.ckpt", arg_tags, "srl_cmp");
        SrlSelector selector = selection_name == "probability"
                                   ? SrlSelector::probability
                                   : SrlSelector::rule;
        CompletionCorpus srl_as_completion;
        for (const auto& ex : srl) {
          CompletionExample ce;
          ce.context = ex.context;
          ce.source = ex.utterance;
          ce.reference = ex.utterance;
          ce.completion_case = CompletionCase::already_complete;
          srl_as_completion.push_back(std::move(ce));
        }
        auto completions = auto_complete(cmodel, srl_as_completion, split.test,
                                         cfg.beam_k);
        for (GridVariant v : variants) {
          VariantResult res = run_srl_variant(v, selector, cfg.selection_tau, models,
                                              srl, completions, split.test);
          std::string file = std::string("srl_") + res.variant + ".json";
          write_report(data_path(out_path, file.c_str()),
                       make_report(cfg, "srl", res, hashes));
          std::cout << res.variant << " f1=" << res.micro.f1 << "\n";
        }
      }
      return 0;
    }

    if (ev->parsed()) {
      json report;
      if (eval_task == "completion") {
        CompletionCorpus gold = load_completion_jsonl(gold_path);
        CompletionCorpus pred = load_completion_jsonl(pred_path);
        if (gold.size() != pred.size())
          throw ConfigError("gold and prediction sizes differ");
        std::vector<std::vector<std::string>> hyps, refs;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          hyps.push_back(pred[i].reference);
          refs.push_back(gold[i].reference);
        }
        Prf word = word_prf(hyps, refs);
        report = json{{"task", "completion"},
                      {"bleu", bleu(hyps, refs)},
                      {"em", exact_match(hyps, refs)},
                      {"precision", word.precision},
                      {"recall", word.recall},
                      {"f1", word.f1}};
        if (per_example) {
          json breakdown = json::array();
          for (std::size_t i = 0; i < gold.size(); ++i)
            breakdown.push_back(json{{"hyp", hyps[i]},
                                     {"ref", refs[i]},
                                     {"em", hyps[i] == refs[i]}});
          report["per_example"] = breakdown;
        }
      } else if (eval_task == "da") {
        LabelInventory acts = LabelInventory::load(data_path(dir, "da_labels.txt"));
        DACorpus gold = load_da_jsonl(gold_path, acts);
        DACorpus pred = load_da_jsonl(pred_path, acts);
        if (gold.size() != pred.size())
          throw ConfigError("gold and prediction sizes differ");
        std::vector<std::vector<int>> p, g;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          p.push_back(pred[i].labels);
          g.push_back(gold[i].labels);
        }
        Prf micro = multilabel_prf(p, g);
        Prf macro = multilabel_prf_macro(p, g, acts.size());
        report = json{{"task", "da"},
                      {"precision", micro.precision},
                      {"recall", micro.recall},
                      {"f1", micro.f1},
                      {"macro",
                       {{"precision", macro.precision},
                        {"recall", macro.recall},
                        {"f1", macro.f1}}}};
      } else {
        SRLCorpus gold = load_srl_jsonl(gold_path);
        SRLCorpus pred = load_srl_jsonl(pred_path);
        if (gold.size() != pred.size())
          throw ConfigError("gold and prediction sizes differ");
        std::vector<std::vector<SrlFrame>> p, g;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          std::vector<SrlFrame> pf, gf;
          for (const auto& ann : pred[i].frames)
            pf.push_back(extract_frame(ann.tags, ann.predicate_source, ann.predicate_span));
          for (const auto& ann : gold[i].frames)
            gf.push_back(extract_frame(ann.tags, ann.predicate_source, ann.predicate_span));
          p.push_back(std::move(pf));
          g.push_back(std::move(gf));
        }
        Prf modified = srl_span_prf(p, g, SrlScoringMode::modified);
        Prf standard = srl_span_prf(p, g, SrlScoringMode::standard);
        report = json{{"task", "srl"},
                      {"precision", modified.precision},
                      {"recall", modified.recall},
                      {"f1", modified.f1},
                      {"standard",
                       {{"precision", standard.precision},
                        {"recall", standard.recall},
                        {"f1", standard.f1}}}};
      }
      if (report_path.empty())
        std::cout << report.dump(2) << "\n";
      else
        write_report(report_path, report);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
