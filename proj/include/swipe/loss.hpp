#pragma once

#include <span>

#include "swipe/segment_matrix.hpp"

namespace swipe {

struct LossResult {
  double value = 0.0;
  Vector d_y;  // d(value)/dy
};

// Softmax cross-entropy over the document scores.
LossResult loss_multiclass(const Vector& y, std::size_t gold);

// Mean over labels of binary cross-entropy between sigmoid(y_i) and gold_i;
// sigmoid(0) = 1/2 lines up with the b_i = [y_i > 0] decision.
LossResult loss_multilabel(const Vector& y, std::span<const int> gold);

// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

}  // namespace swipe
