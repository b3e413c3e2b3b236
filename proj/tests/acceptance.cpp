// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any gating check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swipe/grad_check.hpp"
#include "swipe/metrics.hpp"
#include "swipe/report_io.hpp"
#include "swipe/scaling.hpp"
#include "swipe/sufficiency.hpp"
#include "swipe/synthetic.hpp"
#include "swipe/trainer.hpp"

using namespace swipe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

SwipeParams random_head(std::size_t labels, std::size_t h, Rng& rng) {
  const auto L = static_cast<Eigen::Index>(labels);
  const auto H = static_cast<Eigen::Index>(h);
  return {random_matrix(L, H, rng), random_matrix(L, 1, rng).col(0), random_matrix(L, H, rng),
          random_matrix(L, 1, rng).col(0)};
}

// ---------------------------------------------------------------- 1 to 3

void perceptron_equivalence() {
  const auto start = Clock::now();
  Rng rng(sub_seed(1, "acceptance.perceptron"));
  std::size_t mismatches = 0, checks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t L = 1 + uniform_index(rng, 5);
    const std::size_t h = 1 + uniform_index(rng, 16);
    const auto params = random_head(L, h, rng);
    const SegmentMatrix x{"d", random_matrix(1, static_cast<Eigen::Index>(h), rng)};
    for (auto s : {PoolingStrategy::Max, PoolingStrategy::Sum}) {
      const auto pred = classify(x, params, s);
      for (std::size_t i = 0; i < L; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const int perceptron = params.w.row(row).dot(x.rows.row(0)) + params.b(row) > 0 ? 1 : 0;
        mismatches += pred.doc_bits[i] != perceptron;
        ++checks;
      }
    }
  }
  const double t = seconds_since(start);
  report(1, "perceptron equivalence", mismatches == 0 && t < 5.0,
         fmt("%zu mismatches over %zu label bits (1000 instances, max and sum), %.2fs", mismatches, checks, t));
}

void explanation_soundness() {
  const auto start = Clock::now();
  Rng rng(sub_seed(1, "acceptance.soundness"));
  std::size_t violations = 0, checks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t L = 1 + uniform_index(rng, 5);
    const std::size_t h = 1 + uniform_index(rng, 8);
    const auto m = static_cast<Eigen::Index>(1 + uniform_index(rng, 12));
    const auto params = random_head(L, h, rng);
    const SegmentMatrix x{"d", random_matrix(m, static_cast<Eigen::Index>(h), rng)};
    for (auto s : {PoolingStrategy::Max, PoolingStrategy::GatedMax}) {
      const auto pred = classify(x, params, s);
      for (std::size_t i = 0; i < L; ++i) {
        bool any_positive = false;
        for (Eigen::Index k = 0; k < m; ++k) any_positive |= pred.z(static_cast<Eigen::Index>(i), k) > 0;
        const auto e = explain(pred, i);
        violations += (pred.doc_bits[i] == 1) != any_positive;
        violations += e.positive_segments.empty() == any_positive;
        ++checks;
      }
    }
  }
  const double t = seconds_since(start);
  report(2, "explanation soundness", violations == 0 && t < 5.0,
         fmt("%zu violations over %zu label decisions (max and gated max), %.2fs", violations, checks, t));
}

void pooling_oracle() {
  const auto start = Clock::now();
  Rng rng(sub_seed(1, "acceptance.pooling"));
  double worst = 0.0;
  std::size_t argmax_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto L = static_cast<Eigen::Index>(1 + uniform_index(rng, 5));
    const auto m = static_cast<Eigen::Index>(1 + uniform_index(rng, 6));
    const Matrix z = random_matrix(L, m, rng);
    const Matrix g = random_matrix(L, m, rng).unaryExpr([](double v) { return sigmoid(v); });
    for (auto s : {PoolingStrategy::Max, PoolingStrategy::GatedMax, PoolingStrategy::Sum, PoolingStrategy::GatedSum}) {
      const auto pooled = pool(z, is_gated(s) ? &g : nullptr, s);
      for (Eigen::Index i = 0; i < L; ++i) {
        double acc = 0.0;
        std::size_t best = 0;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double v = is_gated(s) ? g(i, k) * z(i, k) : z(i, k);
          if (!is_max(s)) {
            acc += v;
          } else if (k == 0 || v > acc) {
            acc = v;
            best = static_cast<std::size_t>(k);
          }
        }
        worst = std::max(worst, std::abs(pooled.y(i) - acc));
        if (is_max(s)) argmax_mismatches += pooled.argmax[static_cast<std::size_t>(i)] != best;
      }
    }
  }
  const double t = seconds_since(start);
  report(3, "pooling oracle", worst <= 1e-6 && argmax_mismatches == 0 && t < 5.0,
         fmt("max |pool - naive| = %.3g, %zu argmax mismatches (1000 instances x 4 strategies), %.2fs", worst,
             argmax_mismatches, t));
}

// ---------------------------------------------------------------- 4

void gradient_checks() {
  const auto start = Clock::now();
  Rng rng(sub_seed(1, "acceptance.gradcheck"));
  double worst = 0.0, worst_default_step = 0.0;
  std::size_t checked = 0, excluded = 0, failed = 0, instances = 0;
  for (auto s : {PoolingStrategy::Max, PoolingStrategy::GatedMax, PoolingStrategy::Sum, PoolingStrategy::GatedSum})
    for (std::size_t layers : {0u, 2u})
      for (auto kind : {TaskKind::MultiClass, TaskKind::MultiLabel})
        for (int rep = 0; rep < 2; ++rep) {
          ModelConfig cfg;
          cfg.hash.buckets = 24;
          cfg.hash.dim = rep == 0 ? 4 : 8;
          cfg.hash.init_scale = 1.0;
          cfg.num_labels = 3;
          cfg.task_kind = kind;
          cfg.pooling = s;
          cfg.interaction.num_layers = layers;
          cfg.interaction.heads = 2;
          cfg.interaction.positions = rep == 1;
          cfg.interaction.max_positions = 4;
          const auto params = init_params(cfg, rng());
          std::vector<Example> batch;
          for (int d = 0; d < 2; ++d) {
            Example ex;
            ex.doc_id = "d" + std::to_string(d);
            const std::size_t m = 1 + uniform_index(rng, 4);
            for (std::size_t k = 0; k < m; ++k) {
              Segment seg;
              seg.doc_id = ex.doc_id;
              seg.index = k;
              const std::size_t len = 1 + uniform_index(rng, 4);
              for (std::size_t t = 0; t < len; ++t) seg.tokens.push_back("t" + std::to_string(uniform_index(rng, 12)));
              ex.segments.push_back(std::move(seg));
            }
            ex.gold.assign(3, 0);
            if (kind == TaskKind::MultiClass) {
              ex.gold[uniform_index(rng, 3)] = 1;
            } else {
              for (auto& bit : ex.gold) bit = static_cast<int>(uniform_index(rng, 2));
            }
            batch.push_back(std::move(ex));
          }
          // Gated at step 1e-5: with layer norm on h=4 rows the O(step^2)
          // truncation of the default 1e-4 step alone reaches ~1e-4.
          GradCheckOptions fine;
          fine.perturbation = 1e-5;
          const auto r = grad_check(cfg, params, batch, fine);
          worst_default_step = std::max(worst_default_step, grad_check(cfg, params, batch).max_rel_error);
          worst = std::max(worst, r.max_rel_error);
          checked += r.checked;
          excluded += r.excluded;
          failed += r.failures.size();
          ++instances;
        }
  const double t = seconds_since(start);
  report(4, "gradient checks", failed == 0 && worst < 1e-4 && t < 60.0,
         fmt("max rel error %.3g at step 1e-5 over %zu coordinates in %zu instances (%zu tie exclusions); "
             "%.3g at step 1e-4, %.1fs",
             worst, checked, instances, excluded, worst_default_step, t));
}

// ---------------------------------------------------------------- synthetic experiments

struct Synthetic {
  SyntheticCorpus data;
  Corpus corpus;  // with split tags
  std::vector<Example> train, dev, test;
};

Synthetic make_synthetic() {
  Synthetic s;
  SyntheticSpec spec;  // L=2, 500 docs, 8 segments/doc, one key segment per positive pair, seed 13
  s.data = generate_synthetic(spec);
  s.corpus = split_corpus(s.data.corpus, {0.8, 0.1, 0.1}, 13);
  TruncationConfig structure;
  structure.strategy = TruncationStrategy::Structure;
  auto examples = [&](Split split) {
    const auto docs = s.corpus.in_split(split);
    return make_examples(s.corpus, docs, structure, nullptr);
  };
  s.train = examples(Split::Train);
  s.dev = examples(Split::Dev);
  s.test = examples(Split::Test);
  return s;
}

ModelConfig synthetic_model(PoolingStrategy pooling) {
  ModelConfig cfg;
  cfg.hash.ngram_orders = {1};
  cfg.loss = LossKind::Logistic;
  cfg.pooling = pooling;
  cfg.num_labels = 2;
  return cfg;
}

TrainConfig synthetic_training(std::uint64_t seed, std::size_t epochs) {
  TrainConfig tc;
  tc.epochs = epochs;
  tc.base_lr = 2e-2;
  tc.batch_size = 16;
  tc.seed = seed;
  return tc;
}

struct Outcome {
  ModelConfig cfg;
  TrainResult result;
  double test_accuracy = 0.0;
  double recovery = 0.0;
  double seg_micro_f1 = 0.0;
  double seconds = 0.0;
};

Outcome run(const Synthetic& s, PoolingStrategy pooling, std::uint64_t seed, std::size_t epochs = 10) {
  Outcome o;
  const auto start = Clock::now();
  o.cfg = synthetic_model(pooling);
  o.result = train(o.cfg, init_params(o.cfg, seed), s.train, s.dev, synthetic_training(seed, epochs));
  o.seconds = seconds_since(start);

  std::vector<std::size_t> predicted, gold;
  std::vector<KeyPick> picks;
  std::vector<SegmentLabels> labels;
  for (const auto& ex : s.test) {
    const auto pred = predict(o.cfg, o.result.final_params, ex);
    const std::size_t g = s.corpus.gold_class(s.corpus.find(ex.doc_id));
    predicted.push_back(pred.top_label);
    gold.push_back(g);
    picks.push_back({ex.doc_id, g, explain(pred, g).key_segment});
    labels.push_back({ex.doc_id, pred.seg_bits});
  }
  o.test_accuracy = accuracy(predicted, gold);
  o.recovery = key_segment_recovery(picks, s.data.key_map);
  o.seg_micro_f1 = *segment_labeling_eval(labels, s.data.key_map, 2).micro_f1;
  return o;
}

void synthetic_recovery(const Outcome& max) {
  report(5, "synthetic recovery", max.test_accuracy >= 0.95 && max.recovery >= 0.90 && max.seconds < 120.0,
         fmt("max pooling, 10 epochs: test accuracy %.3f (>= 0.95), top-1 key recovery %.3f (>= 0.90), %.1fs",
             max.test_accuracy, max.recovery, max.seconds));
}

void segment_labeling(const std::map<PoolingStrategy, Outcome>& runs) {
  double best = 0.0;
  std::string best_name;
  std::string detail;
  for (const auto& [s, o] : runs) {
    if (o.seg_micro_f1 > best) {
      best = o.seg_micro_f1;
      best_name = std::string(to_string(s));
    }
    detail += fmt("%s %.3f, ", std::string(to_string(s)).c_str(), o.seg_micro_f1);
  }
  const double best_max = std::max(runs.at(PoolingStrategy::Max).seg_micro_f1, runs.at(PoolingStrategy::GatedMax).seg_micro_f1);
  const double gated_sum = runs.at(PoolingStrategy::GatedSum).seg_micro_f1;
  const double gap = best_max - gated_sum;
  report(6, "segment-labeling F1", best >= 0.85 && gap <= 0.10,
         fmt("micro F1 %sbest %s %.3f (>= 0.85); gated_sum trails the max family by %.1f points (<= 10)",
             detail.c_str(), best_name.c_str(), best, 100.0 * gap));
}

void sufficiency(const Synthetic& s, const Outcome& max) {
  const auto start = Clock::now();
  TrainedModel model{max.cfg, max.result.final_params, max.result.steps};
  SufficiencyOptions options;
  TruncationConfig structure;
  structure.strategy = TruncationStrategy::Structure;
  options.settings = {structure};
  options.probe_encoder.ngram_orders = {1};
  options.probe_train.base_lr = 2e-2;
  options.seed = 13;
  const auto r = sufficiency_test(s.corpus, model, options).rows.at(0);
  const double t = seconds_since(start);
  const bool ordering = r.explanation >= r.random + 0.10;
  const bool competitive = r.explanation >= r.full_text - 0.05;
  report(7, "sufficiency", ordering && competitive,
         fmt("probe accuracy: explanation %.3f, random %.3f (needs explanation >= random + 0.10), full text %.3f "
             "(needs explanation >= full text - 0.05), %.1fs",
             r.explanation, r.random, r.full_text, t));
}

void linear_scaling() {
  const auto start = Clock::now();
  ScalingOptions options;
  options.segment_counts = {8, 16, 32, 64};
  options.segment_len = 64;
  options.trials = 20;
  options.seed = 8;
  const auto rows = scaling_probe(options);
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double ratio = rows[i + 1].median_ms / rows[i].median_ms;
    pass &= ratio <= 2.5;
    detail += fmt("t(%zu)/t(%zu) = %.2f, ", rows[i + 1].n_segments, rows[i].n_segments, ratio);
  }
  report(8, "linear scaling", pass,
         fmt("%smedians %.3f/%.3f/%.3f/%.3f ms over %zu trials, %.1fs", detail.c_str(), rows[0].median_ms,
             rows[1].median_ms, rows[2].median_ms, rows[3].median_ms, options.trials, seconds_since(start)));
}

void convergence(const Synthetic& s) {
  const auto start = Clock::now();
  int max_ahead = 0;
  double max_final = 0.0, sum_final = 0.0;
  std::string epochs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    // sum pooling is still improving on dev after 10 epochs; it plateaus well before 80
    const auto m = run(s, PoolingStrategy::Max, seed, 80);
    const auto u = run(s, PoolingStrategy::Sum, seed, 80);
    const double m1 = m.result.log.front().dev_metric;
    const double u1 = u.result.log.front().dev_metric;
    max_ahead += m1 >= u1;
    max_final += m.test_accuracy / 5.0;
    sum_final += u.test_accuracy / 5.0;
    epochs += fmt("%.2f/%.2f ", m1, u1);
  }
  const double gap = std::abs(max_final - sum_final);
  // The epoch-1 comparison is reported only; the final-accuracy gap gates.
  // accuracies on 50 test documents are multiples of 0.02; the slack absorbs rounding only
  report(9, "convergence pattern", gap <= 0.02 + 1e-9,
         fmt("epoch-1 dev accuracy max/sum per seed %s-> max ahead in %d of 5 (soft, %s); mean test accuracy "
             "after 80 epochs max %.3f, sum %.3f, gap %.1f points (<= 2), %.1fs",
             epochs.c_str(), max_ahead, max_ahead >= 4 ? "met" : "not met", max_final, sum_final, 100.0 * gap,
             seconds_since(start)));
}

std::string metrics_log(const Synthetic& s, std::uint64_t seed) {
  const auto cfg = synthetic_model(PoolingStrategy::GatedMax);
  const auto r = train(cfg, init_params(cfg, seed), s.train, s.dev, synthetic_training(seed, 10));
  std::ostringstream out;
  write_metrics_csv(out, r.log);
  for (const auto& ex : s.test) out << prediction_to_json(predict(cfg, r.final_params, ex), s.corpus.vocab).dump() << '\n';
  return out.str();
}

std::string synth_files(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_docs = 100;
  spec.seed = seed;
  const auto syn = generate_synthetic(spec);
  std::ostringstream out;
  write_jsonl(out, syn.corpus);
  write_keymap(out, syn.key_map, syn.corpus.vocab);
  return out.str();
}

std::string sufficiency_json(const Synthetic& s, const Outcome& max) {
  TrainedModel model{max.cfg, max.result.final_params, max.result.steps};
  SufficiencyOptions options;
  TruncationConfig structure;
  structure.strategy = TruncationStrategy::Structure;
  options.settings = {structure};
  options.probe_encoder.ngram_orders = {1};
  options.probe_train.epochs = 2;
  options.seed = 5;
  return report_to_json(sufficiency_test(s.corpus, model, options)).dump();
}

void determinism(const Synthetic& s, const Outcome& max) {
  const auto start = Clock::now();
  const bool synth = synth_files(21) == synth_files(21);
  const bool split = [&] {
    std::ostringstream a, b;
    write_jsonl(a, split_corpus(s.data.corpus, {0.8, 0.1, 0.1}, 13));
    write_jsonl(b, split_corpus(s.data.corpus, {0.8, 0.1, 0.1}, 13));
    return a.str() == b.str();
  }();
  const bool training = metrics_log(s, 7) == metrics_log(s, 7);
  const bool suff = sufficiency_json(s, max) == sufficiency_json(s, max);
  report(10, "determinism", synth && split && training && suff,
         fmt("synth %s, split %s, train log + predictions %s, sufficiency report %s (two runs each), %.1fs",
             synth ? "identical" : "DIFFERENT", split ? "identical" : "DIFFERENT",
             training ? "identical" : "DIFFERENT", suff ? "identical" : "DIFFERENT", seconds_since(start)));
}

}  // namespace

int main() {
  try {
    perceptron_equivalence();
    explanation_soundness();
    pooling_oracle();
    gradient_checks();

    const auto s = make_synthetic();
    std::map<PoolingStrategy, Outcome> runs;
    for (auto p : {PoolingStrategy::Max, PoolingStrategy::GatedMax, PoolingStrategy::Sum, PoolingStrategy::GatedSum})
      runs.emplace(p, run(s, p, 0));
    synthetic_recovery(runs.at(PoolingStrategy::Max));
    segment_labeling(runs);
    sufficiency(s, runs.at(PoolingStrategy::Max));
    linear_scaling();
    convergence(s);
    determinism(s, runs.at(PoolingStrategy::Max));
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
