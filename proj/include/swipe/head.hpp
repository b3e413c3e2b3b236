#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swipe/corpus.hpp"
#include "swipe/rng.hpp"
#include "swipe/segment_matrix.hpp"

namespace swipe {

enum class PoolingStrategy { Max, GatedMax, Sum, GatedSum };

std::string_view to_string(PoolingStrategy strategy);
PoolingStrategy parse_pooling(std::string_view text);
bool is_gated(PoolingStrategy strategy);
bool is_max(PoolingStrategy strategy);

// Per-label affine scorer shared by every segment, plus the per-label gate.
struct SwipeParams {
  Matrix w;   // L x h, row i scores label i
  Vector b;   // L
  Matrix wg;  // L x h, gate weights
  Vector bg;  // L

  std::size_t labels() const { return static_cast<std::size_t>(w.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(w.cols()); }
  void validate() const;
};

// Rows of w and wg drawn from N(0, 1/h); biases zero.
SwipeParams init_swipe(std::size_t labels, std::size_t h, Rng& rng);
SwipeParams zeros_like(const SwipeParams& params);
// Seeds row `label` of w with a label representation vector.
void set_label_vector(SwipeParams& params, std::size_t label, const Vector& vector);

// z[i][k] = w_i . s_k + b_i, shape L x m.
Matrix segment_scores(const SegmentMatrix& matrix, const SwipeParams& params);
// g[i][k] = sigmoid(wg_i . s_k + bg_i), shape L x m.
Matrix segment_gates(const SegmentMatrix& matrix, const SwipeParams& params);

struct PoolResult {
  Vector y;
  // Max variants: the maximising segment per label, lowest index on ties.
  std::vector<std::size_t> argmax;
};

PoolResult pool(const Matrix& z, const Matrix* g, PoolingStrategy strategy);

// Backward through pool for one document. d_z and d_g (same shape as z)
// receive d(loss)/dz and d(loss)/dg; d_g may be null for ungated variants.
void pool_backward(const Matrix& z, const Matrix* g, const PoolResult& pooled,
                   PoolingStrategy strategy, const Vector& d_y, Matrix& d_z, Matrix* d_g);

struct Prediction {
  std::string doc_id;
  PoolingStrategy strategy = PoolingStrategy::Max;
  Vector y;                       // L
  std::vector<int> doc_bits;      // b_i = [y_i > 0]
  Matrix z;                       // L x m
  std::optional<Matrix> g;        // L x m, gated variants only
  std::vector<std::vector<int>> seg_bits;  // [i][k] = [z_i^k > 0]
  std::vector<std::size_t> argmax;         // max variants only
  std::vector<std::size_t> key_segment;    // per label, top of the ranking
  std::size_t top_label = 0;               // argmax_i y_i, lowest index on ties

  std::size_t labels() const { return static_cast<std::size_t>(z.rows()); }
  std::size_t segments() const { return static_cast<std::size_t>(z.cols()); }
};

Prediction classify(const SegmentMatrix& matrix, const SwipeParams& params,
                    PoolingStrategy strategy);

// Assembles a Prediction from already computed scores (used by the model's
// forward pass, which keeps z and g for backward).
Prediction make_prediction(std::string doc_id, Matrix z, std::optional<Matrix> g,
                           const PoolResult& pooled, PoolingStrategy strategy);

// Decided label indices: {top_label} in multi-class mode, {i : b_i = 1}
// otherwise.
std::vector<std::size_t> decided_labels(const Prediction& pred, TaskKind kind);

// Segment indices by descending z (or g*z when use_gate); stable ties.
std::vector<std::size_t> rank_segments(const Prediction& pred, std::size_t label, bool use_gate);

struct Explanation {
  std::vector<std::size_t> positive_segments;  // {k : z_i^k > 0}
  std::size_t key_segment = 0;
};

// Key segment uses the gated ranking when the prediction carries gates.
Explanation explain(const Prediction& pred, std::size_t label);

}  // namespace swipe
