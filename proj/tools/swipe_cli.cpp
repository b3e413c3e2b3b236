// swipe: command-line front end.
//
//   swipe synth --docs 500 --labels 2 --seed 13 --out data/
//   swipe train --corpus data/corpus.jsonl --checkpoint model.ckpt --out run/
//   swipe predict|explain|eval --checkpoint model.ckpt --corpus data/corpus.jsonl
//   swipe sufficiency --checkpoint model.ckpt --corpus ... --lengths 64,128,256
//   swipe scale --segments 8,16,32,64
//
// Options live on the top-level app so that one key=value config file
// (--config) serves every subcommand; flags given on the command line win.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swipe/checkpoint.hpp"
#include "swipe/error.hpp"
#include "swipe/metrics.hpp"
#include "swipe/precomputed.hpp"
#include "swipe/report_io.hpp"
#include "swipe/scaling.hpp"
#include "swipe/sufficiency.hpp"
#include "swipe/synthetic.hpp"
#include "swipe/trainer.hpp"

namespace fs = std::filesystem;
using namespace swipe;

namespace {

struct Options {
  std::string corpus, vectors, checkpoint, out, keymap;
  std::string task = "multi-class";
  std::string split = "0.8,0.1,0.1";
  std::string eval_split;

  // truncation
  std::string truncate = "auto";
  std::size_t window_len = 64, overlap = 0, max_seg_len = 64;

  // model
  std::string pooling = "max", positions = "off", loss = "auto", ngrams = "1,2";
  std::size_t interaction_layers = 0, heads = 2, hidden = 32, buckets = 1 << 14;
  double init_scale = 0.1;

  // training
  std::size_t epochs = 10, batch_size = 16;
  double lr = 5e-5;
  std::uint64_t seed = 0;

  // synth
  std::size_t docs = 500, labels = 2, segments_per_doc = 8, key_vocab = 20, filler_vocab = 300;

  // sufficiency / scale
  std::string lengths, segments = "8,16,32,64";
  std::size_t segment_len = 64, trials = 20;
  double probe_lr = 2e-2;
  std::string probe_ngrams = "1";
};

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

std::array<double, 3> parse_fractions(const std::string& text) {
  std::array<double, 3> f{};
  std::stringstream in(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 3) throw ConfigError("--split takes three fractions");
    try {
      f[n++] = std::stod(item);
    } catch (const std::exception&) {
      throw ConfigError("bad --split '" + text + "'");
    }
  }
  if (n != 3) throw ConfigError("--split takes three fractions");
  return f;
}

bool parse_on_off(const std::string& text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw ConfigError("--positions takes on or off, got '" + text + "'");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  file.open(path);
  if (!file) throw LookupError("cannot write '" + path + "'");
  return file;
}

TruncationConfig truncation_from(const Options& o) {
  TruncationConfig t;
  t.strategy = parse_truncation_strategy(o.truncate);
  t.window_len = o.window_len;
  t.overlap = o.overlap;
  t.max_seg_len = o.max_seg_len;
  t.validate();
  return t;
}

// The split is re-derived from the seed and fractions, so later commands see
// the same train/dev/test partition as training did.
Corpus load_corpus(const Options& o, TaskKind kind, std::uint64_t seed) {
  require(o.corpus, "--corpus");
  return split_corpus(load_jsonl(o.corpus, kind), parse_fractions(o.split), sub_seed(seed, "split"));
}

std::optional<PrecomputedVectors> load_vectors(const Options& o) {
  if (o.vectors.empty()) return std::nullopt;
  return load_precomputed(o.vectors);
}

std::vector<const Document*> select_docs(const Corpus& corpus, const std::string& which) {
  if (which.empty() || which == "all") {
    std::vector<const Document*> all;
    for (const auto& d : corpus.documents) all.push_back(&d);
    return all;
  }
  return corpus.in_split(parse_split(which));
}

// ---------------------------------------------------------------- commands

void cmd_synth(const Options& o) {
  SyntheticSpec spec;
  spec.num_docs = o.docs;
  spec.num_labels = o.labels;
  spec.segments_per_doc = {o.segments_per_doc, o.segments_per_doc};
  spec.key_vocab_per_label = o.key_vocab;
  spec.filler_vocab = o.filler_vocab;
  spec.task_kind = parse_task_kind(o.task);
  spec.seed = o.seed;
  const auto syn = generate_synthetic(spec);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  write_jsonl(dir / "corpus.jsonl", syn.corpus);
  write_keymap(dir / "keymap.jsonl", syn.key_map, syn.corpus.vocab);
  std::printf("wrote %zu documents to %s\n", syn.corpus.documents.size(), (dir / "corpus.jsonl").c_str());
}

void cmd_train(const Options& o) {
  require(o.checkpoint, "--checkpoint");
  const auto kind = parse_task_kind(o.task);
  const auto corpus = load_corpus(o, kind, o.seed);
  const auto vectors = load_vectors(o);
  const auto truncation = truncation_from(o);

  ModelConfig cfg;
  cfg.task_kind = kind;
  cfg.num_labels = corpus.vocab.size();
  cfg.pooling = parse_pooling(o.pooling);
  cfg.loss = parse_loss_kind(o.loss);
  cfg.interaction.num_layers = o.interaction_layers;
  cfg.interaction.heads = o.heads;
  cfg.interaction.positions = parse_on_off(o.positions);
  if (vectors) {
    cfg.encoder_mode = EncoderMode::Precomputed;
    cfg.precomputed_dim = vectors->dim();
  } else {
    cfg.hash.dim = o.hidden;
    cfg.hash.buckets = o.buckets;
    cfg.hash.ngram_orders = parse_list(o.ngrams, "--ngrams");
    cfg.hash.init_scale = o.init_scale;
  }
  cfg.validate();

  TrainConfig tc;
  tc.epochs = o.epochs;
  tc.base_lr = o.lr;
  tc.batch_size = o.batch_size;
  tc.seed = o.seed;

  const PrecomputedVectors* vp = vectors ? &*vectors : nullptr;
  const auto train_docs = corpus.in_split(Split::Train);
  const auto dev_docs = corpus.in_split(Split::Dev);
  const auto train_set = make_examples(corpus, train_docs, truncation, vp);
  const auto dev_set = make_examples(corpus, dev_docs, truncation, vp);

  const auto result = train(cfg, init_params(cfg, sub_seed(o.seed, "init")), train_set, dev_set, tc,
                            [](const EpochMetrics& m) {
                              std::fprintf(stderr, "epoch %zu  loss %.4f  dev %.4f\n", m.epoch, m.train_loss,
                                           m.dev_metric);
                            });

  if (fs::path(o.checkpoint).has_parent_path()) fs::create_directories(fs::path(o.checkpoint).parent_path());
  save_checkpoint(fs::path(o.checkpoint), Checkpoint{cfg, tc, truncation, corpus.vocab, result.final_params,
                                                     result.steps});
  const fs::path dir = o.out.empty() ? fs::path(o.checkpoint).parent_path() : fs::path(o.out);
  if (!dir.empty()) fs::create_directories(dir);
  std::ofstream csv(dir / "metrics.csv");
  write_metrics_csv(csv, result.log);
  std::printf("final dev %s %.4f\n", kind == TaskKind::MultiClass ? "accuracy" : "micro_f1",
              result.log.back().dev_metric);
}

struct Loaded {
  Checkpoint ckpt;
  Corpus corpus;
  std::optional<PrecomputedVectors> vectors;
  std::vector<Example> examples;
  std::vector<const Document*> docs;
};

// Checkpoint settings are the defaults; truncation flags given explicitly
// (command line or config file) override them.
Loaded load_for_inference(const Options& o, const CLI::App& app, const std::string& default_split) {
  require(o.checkpoint, "--checkpoint");
  Loaded l;
  l.ckpt = load_checkpoint(fs::path(o.checkpoint));
  const auto seed = app.count("--seed") ? o.seed : l.ckpt.train.seed;
  l.corpus = load_corpus(o, l.ckpt.model.task_kind, seed);
  if (l.corpus.vocab.names() != l.ckpt.vocab.names())
    throw ConfigError("corpus labels do not match the checkpoint's label set");
  auto& t = l.ckpt.truncation;
  if (app.count("--truncate")) t.strategy = parse_truncation_strategy(o.truncate);
  if (app.count("--window-len")) t.window_len = o.window_len;
  if (app.count("--overlap")) t.overlap = o.overlap;
  if (app.count("--max-seg-len")) t.max_seg_len = o.max_seg_len;
  t.validate();
  l.vectors = load_vectors(o);
  if (l.ckpt.model.encoder_mode == EncoderMode::Precomputed && !l.vectors)
    throw ConfigError("checkpoint expects precomputed vectors: pass --vectors");
  l.docs = select_docs(l.corpus, o.eval_split.empty() ? default_split : o.eval_split);
  l.examples = make_examples(l.corpus, l.docs, t, l.vectors ? &*l.vectors : nullptr);
  return l;
}

void cmd_predict(const Options& o, const CLI::App& app) {
  const auto l = load_for_inference(o, app, "all");
  std::ofstream file;
  auto& out = open_out(o.out, file);
  for (const auto& ex : l.examples)
    out << prediction_to_json(predict(l.ckpt.model, l.ckpt.params, ex), l.ckpt.vocab).dump() << '\n';
}

void cmd_explain(const Options& o, const CLI::App& app) {
  const auto l = load_for_inference(o, app, "all");
  std::ofstream file;
  auto& out = open_out(o.out, file);
  const bool gated = is_gated(l.ckpt.model.pooling);
  for (const auto& ex : l.examples) {
    const auto pred = predict(l.ckpt.model, l.ckpt.params, ex);
    for (auto label : decided_labels(pred, l.ckpt.model.task_kind)) {
      const auto e = explain(pred, label);
      nlohmann::json rec{{"doc_id", ex.doc_id},
                         {"label", l.ckpt.vocab.name(label)},
                         {"key_segment", e.key_segment},
                         {"positive_segments", e.positive_segments},
                         {"ranking", rank_segments(pred, label, gated)}};
      if (!ex.segments.empty()) {
        std::string text;
        for (const auto& tok : ex.segments[e.key_segment].tokens) text += (text.empty() ? "" : " ") + tok;
        rec["key_text"] = text;
      }
      out << rec.dump() << '\n';
    }
  }
}

void cmd_eval(const Options& o, const CLI::App& app) {
  const auto l = load_for_inference(o, app, "test");
  const auto kind = l.ckpt.model.task_kind;
  std::vector<Prediction> preds;
  for (const auto& ex : l.examples) preds.push_back(predict(l.ckpt.model, l.ckpt.params, ex));

  nlohmann::json result;
  if (kind == TaskKind::MultiClass) {
    std::vector<std::size_t> p, g;
    for (std::size_t d = 0; d < preds.size(); ++d) {
      p.push_back(preds[d].top_label);
      g.push_back(l.corpus.gold_class(*l.docs[d]));
    }
    result["accuracy"] = accuracy(p, g);
  }
  std::vector<std::vector<int>> p, g;
  for (std::size_t d = 0; d < preds.size(); ++d) {
    std::vector<int> bits(l.ckpt.vocab.size(), 0);
    for (auto label : decided_labels(preds[d], kind)) bits[label] = 1;
    p.push_back(std::move(bits));
    g.push_back(l.examples[d].gold);
  }
  result["labels"] = report_to_json(f1_scores(p, g), l.ckpt.vocab);
  result["documents"] = preds.size();

  if (!o.keymap.empty()) {
    const auto keys = load_keymap(o.keymap, l.ckpt.vocab);
    std::vector<SegmentLabels> seg;
    std::vector<KeyPick> picks;
    for (const auto& pred : preds) {
      seg.push_back({pred.doc_id, pred.seg_bits});
      for (std::size_t i = 0; i < pred.labels(); ++i)
        if (keys.find(pred.doc_id, i)) picks.push_back({pred.doc_id, i, explain(pred, i).key_segment});
    }
    result["segment_labeling"] = report_to_json(segment_labeling_eval(seg, keys, l.ckpt.vocab.size()), l.ckpt.vocab);
    const double recovery = key_segment_recovery(picks, keys);
    result["key_recovery"] = std::isnan(recovery) ? nlohmann::json(nullptr) : nlohmann::json(recovery);
  }
  std::ofstream file;
  open_out(o.out, file) << result.dump(2) << '\n';
}

void cmd_sufficiency(const Options& o, const CLI::App& app) {
  require(o.checkpoint, "--checkpoint");
  const auto ckpt = load_checkpoint(fs::path(o.checkpoint));
  const auto seed = app.count("--seed") ? o.seed : ckpt.train.seed;
  const auto corpus = load_corpus(o, ckpt.model.task_kind, seed);
  const auto vectors = load_vectors(o);

  SufficiencyOptions options;
  if (o.lengths.empty()) {
    options.settings = {ckpt.truncation};
  } else {
    for (auto len : parse_list(o.lengths, "--lengths")) {
      TruncationConfig t = ckpt.truncation;
      t.strategy = TruncationStrategy::Auto;
      t.window_len = len;
      t.overlap = app.count("--overlap") ? o.overlap : 0;
      options.settings.push_back(t);
    }
  }
  options.probe_encoder.ngram_orders = parse_list(o.probe_ngrams, "--probe-ngrams");
  options.probe_train.base_lr = o.probe_lr;
  options.seed = sub_seed(seed, "sufficiency");
  const auto report = sufficiency_test(corpus, TrainedModel{ckpt.model, ckpt.params, ckpt.trained_steps}, options,
                                       vectors ? &*vectors : nullptr);
  if (o.out.empty()) {
    write_sufficiency_csv(std::cout, report);
    return;
  }
  fs::create_directories(o.out);
  std::ofstream csv(fs::path(o.out) / "sufficiency.csv");
  write_sufficiency_csv(csv, report);
  std::ofstream json(fs::path(o.out) / "sufficiency.json");
  json << report_to_json(report).dump(2) << '\n';
  write_sufficiency_csv(std::cout, report);
}

void cmd_scale(const Options& o) {
  ScalingOptions options;
  options.segment_counts = parse_list(o.segments, "--segments");
  options.segment_len = o.segment_len;
  options.trials = o.trials;
  options.seed = o.seed;
  options.model.pooling = parse_pooling(o.pooling);
  options.model.hash.dim = o.hidden;
  options.model.hash.buckets = o.buckets;
  options.model.hash.ngram_orders = parse_list(o.ngrams, "--ngrams");
  options.model.interaction.num_layers = o.interaction_layers;
  options.model.interaction.heads = o.heads;
  options.model.interaction.positions = parse_on_off(o.positions);
  const auto rows = scaling_probe(options);
  std::ofstream file;
  write_scaling_csv(open_out(o.out, file), rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-level multi-label perceptron classifier with built-in explanations", "swipe"};
  app.set_config("--config", "", "key=value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--corpus", o.corpus, "corpus JSONL");
  app.add_option("--vectors", o.vectors, "precomputed segment vectors JSONL (replaces the hashed encoder)");
  app.add_option("--checkpoint", o.checkpoint, "checkpoint path (written by train, read by the others)");
  app.add_option("--out", o.out, "output file or directory, depending on the command");
  app.add_option("--keymap", o.keymap, "gold key-segment JSONL for eval");
  app.add_option("--task", o.task, "multi-class or multi-label")->capture_default_str();
  app.add_option("--split", o.split, "train,dev,test fractions for untagged documents")->capture_default_str();
  app.add_option("--eval-split", o.eval_split, "train, dev, test or all (default: test for eval, all otherwise)");

  app.add_option("--truncate", o.truncate, "auto, punct or structure")->capture_default_str();
  app.add_option("--window-len", o.window_len)->capture_default_str();
  app.add_option("--overlap", o.overlap)->capture_default_str();
  app.add_option("--max-seg-len", o.max_seg_len)->capture_default_str();

  app.add_option("--pooling", o.pooling, "max, gated_max, sum or gated_sum")->capture_default_str();
  app.add_option("--interaction-layers", o.interaction_layers)->capture_default_str();
  app.add_option("--heads", o.heads, "attention heads per interaction layer")->capture_default_str();
  app.add_option("--positions", o.positions, "on or off")->capture_default_str();
  app.add_option("--loss", o.loss, "auto, softmax or logistic")->capture_default_str();
  app.add_option("--hidden", o.hidden, "hashed embedding width h")->capture_default_str();
  app.add_option("--buckets", o.buckets, "hash buckets")->capture_default_str();
  app.add_option("--ngrams", o.ngrams, "n-gram orders, comma separated")->capture_default_str();
  app.add_option("--init-scale", o.init_scale, "embedding init scale")->capture_default_str();

  app.add_option("--epochs", o.epochs)->capture_default_str();
  app.add_option("--lr", o.lr)->capture_default_str();
  app.add_option("--batch-size", o.batch_size)->capture_default_str();
  app.add_option("--seed", o.seed)->capture_default_str();

  app.add_option("--docs", o.docs)->capture_default_str();
  app.add_option("--labels", o.labels)->capture_default_str();
  app.add_option("--segments-per-doc", o.segments_per_doc)->capture_default_str();
  app.add_option("--key-vocab", o.key_vocab, "key tokens per label")->capture_default_str();
  app.add_option("--filler-vocab", o.filler_vocab)->capture_default_str();

  app.add_option("--lengths", o.lengths, "sufficiency: auto window lengths, comma separated");
  app.add_option("--probe-lr", o.probe_lr)->capture_default_str();
  app.add_option("--probe-ngrams", o.probe_ngrams)->capture_default_str();
  app.add_option("--segments", o.segments, "scale: segment counts, comma separated")->capture_default_str();
  app.add_option("--segment-len", o.segment_len)->capture_default_str();
  app.add_option("--trials", o.trials)->capture_default_str();

  auto* synth = app.add_subcommand("synth", "write a planted-key synthetic corpus and its key map");
  auto* train_cmd = app.add_subcommand("train", "train and write a checkpoint plus metrics.csv");
  auto* predict_cmd = app.add_subcommand("predict", "per-document predictions as JSONL");
  auto* explain_cmd = app.add_subcommand("explain", "key and positive segments per decided label as JSONL");
  auto* eval_cmd = app.add_subcommand("eval", "document metrics, plus segment labeling with --keymap");
  auto* suff = app.add_subcommand("sufficiency", "probe accuracy on explanations, random segments and full text");
  auto* scale = app.add_subcommand("scale", "forward+backward time against segment count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) cmd_synth(o);
    if (*train_cmd) cmd_train(o);
    if (*predict_cmd) cmd_predict(o, app);
    if (*explain_cmd) cmd_explain(o, app);
    if (*eval_cmd) cmd_eval(o, app);
    if (*suff) cmd_sufficiency(o, app);
    if (*scale) cmd_scale(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "swipe: %s\n", e.what());
    return 1;
  }
  return 0;
}
