#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "swipe/model.hpp"

namespace swipe {

struct ScalingOptions {
  std::vector<std::size_t> segment_counts{8, 16, 32, 64};
  std::size_t segment_len = 64;
  ModelConfig model;
  std::size_t trials = 20;
  // Forward+backward passes per timed trial; the reported time is per pass.
  std::size_t repeats = 8;
  std::uint64_t seed = 0;
};

struct ScalingRow {
  std::size_t n_segments = 0;
  double median_ms = 0.0;
  double p10_ms = 0.0;
  double p90_ms = 0.0;
};

// Times forward + backward on random documents of n segments x segment_len
// tokens, single-threaded.
std::vector<ScalingRow> scaling_probe(const ScalingOptions& options);

// Columns: n_segments, median_ms, p10_ms, p90_ms.
void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows);

}  // namespace swipe
