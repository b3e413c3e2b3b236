#include "swipe/head.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swipe/error.hpp"
#include "swipe/loss.hpp"

namespace swipe {

std::string_view to_string(PoolingStrategy strategy) {
  switch (strategy) {
    case PoolingStrategy::Max: return "max";
    case PoolingStrategy::GatedMax: return "gated_max";
    case PoolingStrategy::Sum: return "sum";
    case PoolingStrategy::GatedSum: return "gated_sum";
  }
  return "max";
}

PoolingStrategy parse_pooling(std::string_view text) {
  if (text == "max") return PoolingStrategy::Max;
  if (text == "gated_max") return PoolingStrategy::GatedMax;
  if (text == "sum") return PoolingStrategy::Sum;
  if (text == "gated_sum") return PoolingStrategy::GatedSum;
  throw ConfigError("unknown pooling strategy '" + std::string(text) + "'");
}

bool is_gated(PoolingStrategy s) { return s == PoolingStrategy::GatedMax || s == PoolingStrategy::GatedSum; }
bool is_max(PoolingStrategy s) { return s == PoolingStrategy::Max || s == PoolingStrategy::GatedMax; }

void SwipeParams::validate() const {
  const auto L = w.rows();
  const auto h = w.cols();
  if (b.size() != L || wg.rows() != L || wg.cols() != h || bg.size() != L)
    throw ConfigError("SWIPE parameter shapes disagree");
  if (!w.allFinite() || !b.allFinite() || !wg.allFinite() || !bg.allFinite())
    throw ValidationError("SWIPE parameters contain non-finite entries");
}

SwipeParams init_swipe(std::size_t labels, std::size_t h, Rng& rng) {
  const auto L = static_cast<Eigen::Index>(labels);
  const auto hh = static_cast<Eigen::Index>(h);
  const double scale = 1.0 / std::sqrt(static_cast<double>(h));
  SwipeParams p;
  p.w.resize(L, hh);
  p.wg.resize(L, hh);
  for (Eigen::Index i = 0; i < p.w.size(); ++i) p.w.data()[i] = scale * standard_normal(rng);
  for (Eigen::Index i = 0; i < p.wg.size(); ++i) p.wg.data()[i] = scale * standard_normal(rng);
  p.b = Vector::Zero(L);
  p.bg = Vector::Zero(L);
  return p;
}

SwipeParams zeros_like(const SwipeParams& params) {
  return {Matrix::Zero(params.w.rows(), params.w.cols()), Vector::Zero(params.b.size()),
          Matrix::Zero(params.wg.rows(), params.wg.cols()), Vector::Zero(params.bg.size())};
}

void set_label_vector(SwipeParams& params, std::size_t label, const Vector& vector) {
  if (label >= params.labels()) throw ConfigError("label index out of range");
  if (static_cast<std::size_t>(vector.size()) != params.dim())
    throw ConfigError("label vector dimension does not match h");
  params.w.row(static_cast<Eigen::Index>(label)) = vector.transpose();
}

namespace {

void check_dims(const SegmentMatrix& matrix, const Matrix& weights) {
  if (matrix.h() != static_cast<std::size_t>(weights.cols()))
    throw ConfigError("segment dimension " + std::to_string(matrix.h()) +
                      " does not match SWIPE weight dimension " + std::to_string(weights.cols()));
}

}  // namespace

Matrix segment_scores(const SegmentMatrix& matrix, const SwipeParams& params) {
  check_dims(matrix, params.w);
  Matrix z = params.w * matrix.rows.transpose();
  z.colwise() += params.b;
  return z;
}

Matrix segment_gates(const SegmentMatrix& matrix, const SwipeParams& params) {
  check_dims(matrix, params.wg);
  Matrix pre = params.wg * matrix.rows.transpose();
  pre.colwise() += params.bg;
  return pre.unaryExpr([](double v) { return sigmoid(v); });
}

PoolResult pool(const Matrix& z, const Matrix* g, PoolingStrategy strategy) {
  if (is_gated(strategy) && !g) throw ConfigError("gated pooling requires gate values");
  if (g && (g->rows() != z.rows() || g->cols() != z.cols()))
    throw ConfigError("gate matrix shape does not match the score matrix");
  if (z.cols() == 0) throw ConfigError("cannot pool over zero segments");

  PoolResult out;
  out.y.resize(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    auto value = [&](Eigen::Index k) {
      return is_gated(strategy) ? (*g)(i, k) * z(i, k) : z(i, k);
    };
    if (is_max(strategy)) {
      Eigen::Index best = 0;
      double best_val = value(0);
      for (Eigen::Index k = 1; k < z.cols(); ++k) {
        const double v = value(k);
        if (v > best_val) best_val = v, best = k;
      }
      out.y(i) = best_val;
      out.argmax.push_back(static_cast<std::size_t>(best));
    } else {
      double total = 0.0;
      for (Eigen::Index k = 0; k < z.cols(); ++k) total += value(k);
      out.y(i) = total;
    }
  }
  return out;
}

void pool_backward(const Matrix& z, const Matrix* g, const PoolResult& pooled,
                   PoolingStrategy strategy, const Vector& d_y, Matrix& d_z, Matrix* d_g) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    switch (strategy) {
      case PoolingStrategy::Max:
        d_z(i, static_cast<Eigen::Index>(pooled.argmax[i])) += d_y(i);
        break;
      case PoolingStrategy::GatedMax: {
        const auto k = static_cast<Eigen::Index>(pooled.argmax[i]);
        d_z(i, k) += d_y(i) * (*g)(i, k);
        if (d_g) (*d_g)(i, k) += d_y(i) * z(i, k);
        break;
      }
      case PoolingStrategy::Sum:
        d_z.row(i).array() += d_y(i);
        break;
      case PoolingStrategy::GatedSum:
        d_z.row(i) += d_y(i) * g->row(i);
        if (d_g) d_g->row(i) += d_y(i) * z.row(i);
        break;
    }
  }
}

Prediction make_prediction(std::string doc_id, Matrix z, std::optional<Matrix> g,
                           const PoolResult& pooled, PoolingStrategy strategy) {
  Prediction pred;
  pred.doc_id = std::move(doc_id);
  pred.strategy = strategy;
  pred.y = pooled.y;
  pred.z = std::move(z);
  pred.g = std::move(g);
  pred.argmax = pooled.argmax;
  const auto L = pred.z.rows();
  for (Eigen::Index i = 0; i < L; ++i) {
    pred.doc_bits.push_back(pred.y(i) > 0.0 ? 1 : 0);
    std::vector<int> bits;
    for (Eigen::Index k = 0; k < pred.z.cols(); ++k) bits.push_back(pred.z(i, k) > 0.0 ? 1 : 0);
    pred.seg_bits.push_back(std::move(bits));
  }
  for (Eigen::Index i = 0; i < L; ++i)
    pred.key_segment.push_back(rank_segments(pred, static_cast<std::size_t>(i), pred.g.has_value()).front());
  Eigen::Index top = 0;
  for (Eigen::Index i = 1; i < L; ++i)
    if (pred.y(i) > pred.y(top)) top = i;
  pred.top_label = static_cast<std::size_t>(top);
  return pred;
}

Prediction classify(const SegmentMatrix& matrix, const SwipeParams& params, PoolingStrategy strategy) {
  Matrix z = segment_scores(matrix, params);
  std::optional<Matrix> g;
  if (is_gated(strategy)) g = segment_gates(matrix, params);
  const PoolResult pooled = pool(z, g ? &*g : nullptr, strategy);
  return make_prediction(matrix.doc_id, std::move(z), std::move(g), pooled, strategy);
}

std::vector<std::size_t> decided_labels(const Prediction& pred, TaskKind kind) {
  if (kind == TaskKind::MultiClass) return {pred.top_label};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pred.doc_bits.size(); ++i)
    if (pred.doc_bits[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> rank_segments(const Prediction& pred, std::size_t label, bool use_gate) {
  if (label >= pred.labels()) throw ConfigError("label index out of range");
  if (use_gate && !pred.g) throw ConfigError("gated ranking requested without gate values");
  const auto i = static_cast<Eigen::Index>(label);
  std::vector<double> score(pred.segments());
  for (std::size_t k = 0; k < score.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    score[k] = use_gate ? (*pred.g)(i, kk) * pred.z(i, kk) : pred.z(i, kk);
  }
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  return order;
}

Explanation explain(const Prediction& pred, std::size_t label) {
  if (label >= pred.labels()) throw ConfigError("label index out of range");
  Explanation out;
  for (std::size_t k = 0; k < pred.segments(); ++k)
    if (pred.seg_bits[label][k]) out.positive_segments.push_back(k);
  out.key_segment = rank_segments(pred, label, pred.g.has_value()).front();
  return out;
}

}  // namespace swipe
