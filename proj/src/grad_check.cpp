#include "swipe/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace swipe {

GradCheckReport compare_gradients(ModelParams& params, ModelParams& analytic,
                                  const std::function<LossProbe()>& evaluate,
                                  const GradCheckOptions& options) {
  GradCheckReport report;
  const auto base = evaluate();
  auto p_views = param_views(params);
  auto a_views = param_views(analytic);
  for (std::size_t v = 0; v < p_views.size(); ++v) {
    auto values = p_views[v].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      const double step = options.perturbation * std::max(1.0, std::abs(original));
      values[i] = original + step;
      const auto plus = evaluate();
      values[i] = original - step;
      const auto minus = evaluate();
      values[i] = original;
      if (plus.signature != base.signature || minus.signature != base.signature) {
        ++report.excluded;
        continue;
      }
      const double numeric = (plus.loss - minus.loss) / (2.0 * step);
      const double exact = a_views[v].values[i];
      const double denom = std::max({std::abs(numeric), std::abs(exact), options.floor});
      const double rel = std::abs(numeric - exact) / denom;
      ++report.checked;
      report.max_rel_error = std::max(report.max_rel_error, rel);
      if (rel >= options.tolerance) report.failures.push_back({p_views[v].name, i, exact, numeric, rel});
    }
  }
  return report;
}

GradCheckReport grad_check(const ModelConfig& cfg, ModelParams params, std::span<const Example> examples,
                           const GradCheckOptions& options) {
  ModelParams analytic;
  batch_loss(cfg, params, examples, &analytic);
  auto evaluate = [&] {
    LossProbe probe;
    double total = 0.0;
    for (const auto& ex : examples) {
      const ForwardState state = forward(cfg, params, ex);
      total += example_loss(cfg, state.pooled.y, ex.gold).value;
      probe.signature.insert(probe.signature.end(), state.pooled.argmax.begin(), state.pooled.argmax.end());
    }
    probe.loss = total / static_cast<double>(examples.size());
    return probe;
  };
  return compare_gradients(params, analytic, evaluate, options);
}

}  // namespace swipe
