#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swipe/rng.hpp"
#include "swipe/segment_matrix.hpp"
#include "swipe/truncator.hpp"

namespace swipe {

struct HashEncoderConfig {
  std::size_t buckets = 1 << 14;
  std::size_t dim = 32;
  std::vector<std::size_t> ngram_orders{1, 2};
  std::uint64_t hash_seed = 0x5319e;
  // Table entries start as init_scale * N(0, 1/dim). Small values keep the
  // untrained mean of a segment's filler n-grams close to zero.
  double init_scale = 0.1;

  void validate() const;
};

struct HashEncoderParams {
  Matrix table;  // buckets x dim
};

HashEncoderParams init_hash_encoder(const HashEncoderConfig& cfg, Rng& rng);

// 64-bit FNV-1a over the seed (8 bytes, little endian) followed by the n-gram
// tokens, each preceded by a 0x1f separator byte. Platform independent.
std::uint64_t hash_ngram(std::span<const std::string> tokens, std::uint64_t seed);

// Bucket of every n-gram of the segment, orders in the configured order and
// positions left to right. A segment shorter than every order contributes
// its whole token list as one n-gram.
std::vector<std::uint32_t> segment_buckets(std::span<const std::string> tokens,
                                           const HashEncoderConfig& cfg);

// Forward state kept for the backward pass.
struct EncodedSegments {
  SegmentMatrix matrix;
  std::vector<std::vector<std::uint32_t>> buckets;
};

// Row k = mean over segment k's n-grams of table[bucket].
EncodedSegments encode_segments(std::span<const Segment> segments,
                                const HashEncoderConfig& cfg,
                                const HashEncoderParams& params);

// Accumulates d(loss)/d(table) into d_table given d(loss)/d(rows).
void encode_segments_backward(const EncodedSegments& encoded, const Matrix& d_rows,
                              Matrix& d_table);

}  // namespace swipe
