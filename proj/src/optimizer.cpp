#include "swipe/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "swipe/error.hpp"

namespace swipe {

double LinearDecay::at(std::size_t step) const {
  const double frac = static_cast<double>(step) / static_cast<double>(std::max<std::size_t>(1, total_steps));
  return base_lr * std::max(0.0, 1.0 - frac);
}

Adam::Adam(AdamConfig cfg, const ModelParams& shape)
    : cfg_(cfg), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

void Adam::step(ModelParams& params, const ModelParams& grads, std::size_t step, double lr) {
  if (step == 0) throw ConfigError("Adam steps are counted from 1");
  auto p_views = param_views(params);
  auto g_views = param_views(grads);
  auto m_views = param_views(m_);
  auto v_views = param_views(v_);
  if (p_views.size() != g_views.size() || p_views.size() != m_views.size())
    throw ConfigError("gradient layout does not match the parameters");

  const double t = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(cfg_.beta1, t);
  const double c2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t v = 0; v < p_views.size(); ++v) {
    auto p = p_views[v].values;
    auto g = g_views[v].values;
    auto m = m_views[v].values;
    auto s = v_views[v].values;
    if (p.size() != g.size()) throw ConfigError("gradient shape mismatch for " + p_views[v].name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      s[i] = cfg_.beta2 * s[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = s[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
}

}  // namespace swipe
