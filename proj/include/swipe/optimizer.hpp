#pragma once

#include <cstddef>

#include "swipe/model.hpp"

namespace swipe {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// lr(step) = base_lr * max(0, 1 - step / total_steps), step counted from 1.
struct LinearDecay {
  double base_lr = 5e-5;
  std::size_t total_steps = 1;

  double at(std::size_t step) const;
};

class Adam {
 public:
  Adam(AdamConfig cfg, const ModelParams& shape);

  // One bias-corrected update at the given step (>= 1) and learning rate.
  void step(ModelParams& params, const ModelParams& grads, std::size_t step, double lr);

  const ModelParams& first_moment() const { return m_; }
  const ModelParams& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  ModelParams m_;
  ModelParams v_;
};

}  // namespace swipe
