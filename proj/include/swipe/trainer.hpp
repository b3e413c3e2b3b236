#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "swipe/model.hpp"
#include "swipe/optimizer.hpp"

namespace swipe {

struct TrainConfig {
  std::size_t epochs = 10;
  double base_lr = 5e-5;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  AdamConfig adam;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double lr = 0.0;  // rate used by the epoch's last step
  double train_loss = 0.0;
  double dev_metric = 0.0;  // accuracy (multi-class) or micro F1 (multi-label)
};

struct TrainResult {
  ModelParams final_params;
  ModelParams best_params;
  double best_dev_metric = 0.0;
  std::size_t best_epoch = 0;
  std::size_t steps = 0;
  std::vector<EpochMetrics> log;
};

// Accuracy for multi-class models, micro F1 over decided labels otherwise.
// NaN when examples is empty.
double evaluate_metric(const ModelConfig& cfg, const ModelParams& params,
                       std::span<const Example> examples);

// Mini-batch Adam with linear decay over epochs * ceil(|train| / batch)
// steps. Deterministic under cfg.seed. Throws ValidationError on an empty
// training set.
TrainResult train(const ModelConfig& model_cfg, ModelParams initial,
                  std::span<const Example> train_set, std::span<const Example> dev_set,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

// CSV columns: epoch, step, lr, train_loss, dev_metric.
void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> log);

struct SeedSummary {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

SeedSummary summarize_seeds(std::vector<double> values);

}  // namespace swipe
