#pragma once

#include <Eigen/Core>
#include <string>

namespace swipe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Encoded segments of one document: row k is the vector of segment k.
struct SegmentMatrix {
  std::string doc_id;
  Matrix rows;  // m x h

  std::size_t m() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t h() const { return static_cast<std::size_t>(rows.cols()); }

  // m >= 1, h >= 1, all entries finite; throws ValidationError.
  void validate() const;
};

}  // namespace swipe
