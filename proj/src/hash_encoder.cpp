#include "swipe/hash_encoder.hpp"

#include <cmath>

#include "swipe/error.hpp"

namespace swipe {

void HashEncoderConfig::validate() const {
  if (buckets == 0) throw ConfigError("hash encoder needs at least one bucket");
  if (buckets > (std::size_t{1} << 32)) throw ConfigError("hash encoder bucket count exceeds 2^32");
  if (dim == 0) throw ConfigError("hash encoder dimension must be >= 1");
  if (ngram_orders.empty()) throw ConfigError("hash encoder needs at least one n-gram order");
  for (std::size_t n : ngram_orders)
    if (n == 0) throw ConfigError("n-gram order must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ConfigError("init scale must be finite and >= 0");
}

HashEncoderParams init_hash_encoder(const HashEncoderConfig& cfg, Rng& rng) {
  cfg.validate();
  HashEncoderParams params;
  params.table.resize(static_cast<Eigen::Index>(cfg.buckets), static_cast<Eigen::Index>(cfg.dim));
  const double scale = cfg.init_scale / std::sqrt(static_cast<double>(cfg.dim));
  for (Eigen::Index i = 0; i < params.table.size(); ++i)
    params.table.data()[i] = scale * standard_normal(rng);
  return params;
}

std::uint64_t hash_ngram(std::span<const std::string> tokens, std::uint64_t seed) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int b = 0; b < 8; ++b) {
    h ^= (seed >> (8 * b)) & 0xff;
    h *= kPrime;
  }
  for (const auto& token : tokens) {
    h ^= 0x1f;
    h *= kPrime;
    for (unsigned char c : token) {
      h ^= c;
      h *= kPrime;
    }
  }
  return h;
}

std::vector<std::uint32_t> segment_buckets(std::span<const std::string> tokens,
                                           const HashEncoderConfig& cfg) {
  std::vector<std::uint32_t> buckets;
  for (std::size_t n : cfg.ngram_orders) {
    if (n > tokens.size()) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      buckets.push_back(
          static_cast<std::uint32_t>(hash_ngram(tokens.subspan(i, n), cfg.hash_seed) % cfg.buckets));
  }
  if (buckets.empty() && !tokens.empty())
    buckets.push_back(static_cast<std::uint32_t>(hash_ngram(tokens, cfg.hash_seed) % cfg.buckets));
  return buckets;
}

EncodedSegments encode_segments(std::span<const Segment> segments, const HashEncoderConfig& cfg,
                                const HashEncoderParams& params) {
  if (segments.empty()) throw ValidationError("cannot encode an empty segment list");
  if (params.table.rows() != static_cast<Eigen::Index>(cfg.buckets) ||
      params.table.cols() != static_cast<Eigen::Index>(cfg.dim))
    throw ConfigError("embedding table shape does not match the encoder config");

  EncodedSegments out;
  out.matrix.doc_id = segments.front().doc_id;
  out.matrix.rows = Matrix::Zero(static_cast<Eigen::Index>(segments.size()), params.table.cols());
  out.buckets.reserve(segments.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    auto buckets = segment_buckets(segments[k].tokens, cfg);
    if (buckets.empty()) throw ValidationError("segment with no tokens");
    auto row = out.matrix.rows.row(static_cast<Eigen::Index>(k));
    for (auto b : buckets) row += params.table.row(b);
    row /= static_cast<double>(buckets.size());
    out.buckets.push_back(std::move(buckets));
  }
  return out;
}

void encode_segments_backward(const EncodedSegments& encoded, const Matrix& d_rows,
                              Matrix& d_table) {
  for (std::size_t k = 0; k < encoded.buckets.size(); ++k) {
    const auto& buckets = encoded.buckets[k];
    const double w = 1.0 / static_cast<double>(buckets.size());
    for (auto b : buckets) d_table.row(b) += w * d_rows.row(static_cast<Eigen::Index>(k));
  }
}

}  // namespace swipe
