#include "swipe/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "swipe/error.hpp"

namespace swipe {

namespace {

double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(sorted.size() - 1, lo + 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Example random_document(std::size_t n_segments, std::size_t segment_len, std::size_t vocab,
                        const ModelConfig& cfg, Rng& rng) {
  Example ex;
  ex.doc_id = "scale-" + std::to_string(n_segments);
  ex.gold.assign(cfg.num_labels, 0);
  ex.gold[0] = 1;
  if (cfg.encoder_mode == EncoderMode::Precomputed) {
    SegmentMatrix m;
    m.doc_id = ex.doc_id;
    m.rows.resize(static_cast<Eigen::Index>(n_segments), static_cast<Eigen::Index>(cfg.precomputed_dim));
    for (Eigen::Index i = 0; i < m.rows.size(); ++i) m.rows.data()[i] = standard_normal(rng);
    ex.vectors = std::move(m);
    return ex;
  }
  for (std::size_t k = 0; k < n_segments; ++k) {
    Segment seg;
    seg.doc_id = ex.doc_id;
    seg.index = k;
    for (std::size_t t = 0; t < segment_len; ++t) seg.tokens.push_back("t" + std::to_string(uniform_index(rng, vocab)));
    ex.segments.push_back(std::move(seg));
  }
  return ex;
}

}  // namespace

std::vector<ScalingRow> scaling_probe(const ScalingOptions& options) {
  if (options.trials == 0 || options.repeats == 0) throw ConfigError("scaling probe needs trials and repeats >= 1");
  if (options.segment_len == 0) throw ConfigError("segment length must be >= 1");
  const auto& cfg = options.model;
  const ModelParams params = init_params(cfg, sub_seed(options.seed, "scale.init"));
  ModelParams grads = zeros_like(params);
  Rng rng(sub_seed(options.seed, "scale.docs"));

  std::vector<ScalingRow> rows;
  for (std::size_t n : options.segment_counts) {
    if (n == 0) throw ConfigError("segment counts must be >= 1");
    const Example ex = random_document(n, options.segment_len, 5000, cfg, rng);
    // warm-up pass, not timed
    {
      const auto state = forward(cfg, params, ex);
      backward(cfg, params, state, example_loss(cfg, state.pooled.y, ex.gold).d_y, grads);
    }
    std::vector<double> times;
    for (std::size_t t = 0; t < options.trials; ++t) {
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t r = 0; r < options.repeats; ++r) {
        const auto state = forward(cfg, params, ex);
        backward(cfg, params, state, example_loss(cfg, state.pooled.y, ex.gold).d_y, grads);
      }
      const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
      times.push_back(elapsed.count() / static_cast<double>(options.repeats));
    }
    rows.push_back({n, quantile(times, 0.5), quantile(times, 0.1), quantile(times, 0.9)});
  }
  return rows;
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows) {
  out << "n_segments,median_ms,p10_ms,p90_ms\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f\n", r.n_segments, r.median_ms, r.p10_ms, r.p90_ms);
    out << buf;
  }
}

}  // namespace swipe
