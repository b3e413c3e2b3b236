#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swipe/model.hpp"

namespace swipe {

struct GradCheckOptions {
  // Central-difference step is perturbation * max(1, |theta|).
  double perturbation = 1e-4;
  double tolerance = 1e-4;
  // Denominator floor for the relative error, so coordinates whose true
  // gradient is ~0 are judged on absolute error.
  double floor = 1e-6;
};

struct GradCheckFailure {
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;  // coordinates whose perturbation moved a max-pool argmax
  std::vector<GradCheckFailure> failures;

  bool passed() const { return failures.empty(); }
};

// Loss plus a signature of every discrete choice (max-pool argmax) the
// forward pass made; a perturbation that changes the signature crosses a
// tie and its coordinate is excluded.
struct LossProbe {
  double loss = 0.0;
  std::vector<std::size_t> signature;
};

GradCheckReport compare_gradients(ModelParams& params, ModelParams& analytic,
                                  const std::function<LossProbe()>& evaluate,
                                  const GradCheckOptions& options);

// Checks backward() on the mean loss of the given examples.
GradCheckReport grad_check(const ModelConfig& cfg, ModelParams params,
                           std::span<const Example> examples, const GradCheckOptions& options = {});

}  // namespace swipe
