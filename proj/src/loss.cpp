#include "swipe/loss.hpp"

#include <cmath>

#include "swipe/error.hpp"

namespace swipe {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossResult loss_multiclass(const Vector& y, std::size_t gold) {
  if (gold >= static_cast<std::size_t>(y.size()))
    throw ValidationError("gold class " + std::to_string(gold) + " out of range for " +
                          std::to_string(y.size()) + " labels");
  const double mx = y.maxCoeff();
  const Vector shifted = (y.array() - mx).exp().matrix();
  const double total = shifted.sum();
  LossResult out;
  out.value = std::log(total) + mx - y(static_cast<Eigen::Index>(gold));
  out.d_y = shifted / total;
  out.d_y(static_cast<Eigen::Index>(gold)) -= 1.0;
  return out;
}

LossResult loss_multilabel(const Vector& y, std::span<const int> gold) {
  if (gold.size() != static_cast<std::size_t>(y.size()))
    throw ValidationError("gold label vector length does not match the score vector");
  const auto L = static_cast<double>(y.size());
  LossResult out;
  out.d_y.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const bool positive = gold[static_cast<std::size_t>(i)] != 0;
    out.value += positive ? softplus(-y(i)) : softplus(y(i));
    out.d_y(i) = (sigmoid(y(i)) - (positive ? 1.0 : 0.0)) / L;
  }
  out.value /= L;
  return out;
}

}  // namespace swipe
