#pragma once

#include <vector>

#include "swipe/rng.hpp"
#include "swipe/segment_matrix.hpp"

namespace swipe {

// Pre-norm transformer encoder layers that let segment vectors attend to
// each other before scoring:
//   x1 = x  + Attn(LN1(x))
//   x2 = x1 + W2 * gelu(W1 * LN2(x1) + c1) + c2
struct InteractionConfig {
  std::size_t num_layers = 0;
  std::size_t heads = 2;
  std::size_t ff_width = 0;  // 0 selects 4h
  bool positions = false;
  std::size_t max_positions = 512;

  std::size_t ff_for(std::size_t h) const { return ff_width == 0 ? 4 * h : ff_width; }
};

struct InteractionLayer {
  Vector ln1_gain, ln1_bias;
  Matrix wq, wk, wv, wo;  // h x h, applied as rows * W
  Vector ln2_gain, ln2_bias;
  Matrix w1;  // h x f
  Vector c1;  // f
  Matrix w2;  // f x h
  Vector c2;  // h
};

struct InteractionParams {
  std::vector<InteractionLayer> layers;
  Matrix positions;  // max_positions x h, empty when disabled
};

InteractionParams init_interaction(const InteractionConfig& cfg, std::size_t h, Rng& rng);
InteractionParams zeros_like(const InteractionParams& params);

// Forward state kept for the backward pass.
struct InteractionCache {
  struct LayerCache {
    Matrix x;          // layer input
    Matrix u1, xhat1;  // LN1 output and normalised input
    Vector inv_std1;
    Matrix q, k, v;
    std::vector<Matrix> probs;  // per head, m x m
    Matrix attn;                // concatenated head outputs, pre-Wo
    Matrix x1;
    Matrix u2, xhat2;
    Vector inv_std2;
    Matrix pre;  // W1 pre-activation
    Matrix act;  // gelu(pre)
  };
  std::vector<LayerCache> layers;
  std::size_t m = 0;
};

// Applies cfg.num_layers layers. Throws ConfigError when h does not match,
// h is not divisible by the head count, or m exceeds the position table.
SegmentMatrix interact(const SegmentMatrix& input, const InteractionConfig& cfg,
                       const InteractionParams& params, InteractionCache* cache = nullptr);

// Returns d(loss)/d(input) and accumulates parameter gradients into grads.
Matrix interact_backward(const InteractionConfig& cfg, const InteractionParams& params,
                         const InteractionCache& cache, const Matrix& d_output,
                         InteractionParams& grads);

}  // namespace swipe
