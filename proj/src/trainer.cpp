#include "swipe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "swipe/error.hpp"
#include "swipe/metrics.hpp"

namespace swipe {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (!(base_lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
}

double evaluate_metric(const ModelConfig& cfg, const ModelParams& params, std::span<const Example> examples) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (cfg.task_kind == TaskKind::MultiClass) {
    std::vector<std::size_t> predicted, gold;
    for (const auto& ex : examples) {
      predicted.push_back(predict(cfg, params, ex).top_label);
      gold.push_back(static_cast<std::size_t>(std::find(ex.gold.begin(), ex.gold.end(), 1) - ex.gold.begin()));
    }
    return accuracy(predicted, gold);
  }
  std::vector<std::vector<int>> predicted, gold;
  for (const auto& ex : examples) {
    predicted.push_back(predict(cfg, params, ex).doc_bits);
    gold.push_back(ex.gold);
  }
  return *f1_scores(predicted, gold).micro_f1;
}

TrainResult train(const ModelConfig& model_cfg, ModelParams initial, std::span<const Example> train_set,
                  std::span<const Example> dev_set, const TrainConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  cfg.validate();
  model_cfg.validate();
  if (train_set.empty()) throw ValidationError("training split is empty");

  const std::size_t per_epoch = (train_set.size() + cfg.batch_size - 1) / cfg.batch_size;
  const LinearDecay schedule{cfg.base_lr, cfg.epochs * per_epoch};

  TrainResult result;
  result.final_params = std::move(initial);
  result.best_params = result.final_params;
  result.best_dev_metric = -std::numeric_limits<double>::infinity();

  Adam adam(cfg.adam, result.final_params);
  Rng rng(sub_seed(cfg.seed, "shuffle"));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  std::size_t step = 0;
  ModelParams grads;
  std::vector<Example> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_in_place(order, rng);
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t r = start; r < end; ++r) batch.push_back(train_set[order[r]]);
      const double loss = batch_loss(model_cfg, result.final_params, batch, &grads);
      loss_sum += loss * static_cast<double>(end - start);
      ++step;
      lr = schedule.at(step);
      adam.step(result.final_params, grads, step, lr);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.step = step;
    metrics.lr = lr;
    metrics.train_loss = loss_sum / static_cast<double>(train_set.size());
    metrics.dev_metric = evaluate_metric(model_cfg, result.final_params, dev_set);
    result.log.push_back(metrics);
    if (on_epoch) on_epoch(metrics);

    const double score = std::isnan(metrics.dev_metric) ? -metrics.train_loss : metrics.dev_metric;
    if (score > result.best_dev_metric) {
      result.best_dev_metric = score;
      result.best_epoch = epoch;
      result.best_params = result.final_params;
    }
  }
  if (dev_set.empty()) result.best_dev_metric = std::numeric_limits<double>::quiet_NaN();
  result.steps = step;
  return result;
}

void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> log) {
  out << "epoch,step,lr,train_loss,dev_metric\n";
  char buf[160];
  for (const auto& m : log) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", m.epoch, m.step, m.lr, m.train_loss,
                  m.dev_metric);
    out << buf;
  }
}

SeedSummary summarize_seeds(std::vector<double> values) {
  SeedSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  const auto n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = s.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = *std::min_element(s.values.begin(), s.values.end());
  s.max = *std::max_element(s.values.begin(), s.values.end());
  return s;
}

}  // namespace swipe
