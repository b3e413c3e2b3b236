#include <doctest.h>

#include <sstream>

#include "swipe/error.hpp"
#include "swipe/grad_check.hpp"
#include "swipe/hash_encoder.hpp"
#include "swipe/precomputed.hpp"
#include "test_util.hpp"

using namespace swipe;

namespace {

Segment seg(std::vector<std::string> tokens, std::size_t index = 0) {
  Segment s;
  s.doc_id = "d";
  s.index = index;
  s.tokens = std::move(tokens);
  return s;
}

// Same closed form as tests/oracles/oracle_values.py.
HashEncoderParams oracle_table(std::size_t buckets, std::size_t dim) {
  HashEncoderParams p;
  p.table.resize(static_cast<Eigen::Index>(buckets), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < buckets; ++b)
    for (std::size_t j = 0; j < dim; ++j)
      p.table(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) =
          static_cast<double>(static_cast<int>((b * 7 + j * 3) % 11) - 5) / 4.0;
  return p;
}

}  // namespace

TEST_CASE("n-gram hash matches the documented FNV-1a construction") {
  const std::vector<std::string> the{"the"};
  const std::vector<std::string> the_cat{"the", "cat"};
  CHECK(hash_ngram(the, 0) == 0x9caca687939dfd95ULL);
  CHECK(hash_ngram(the_cat, 0x5319e) == 0x3b9f38ce434da8caULL);
  CHECK(hash_ngram(the, 1) != hash_ngram(the, 0));
}

TEST_CASE("encode_segments matches the standalone hash-and-average oracle") {
  HashEncoderConfig cfg;
  cfg.buckets = 16;
  cfg.dim = 4;
  const auto params = oracle_table(16, 4);
  const std::vector<Segment> segs{seg({"the", "cat", "sat"}, 0), seg({"a", "dog"}, 1)};
  const auto enc = encode_segments(segs, cfg, params);
  REQUIRE(enc.matrix.m() == 2);
  REQUIRE(enc.matrix.h() == 4);
  const double expected[2][4] = {{-0.15, 0.6, 0.8, -0.65}, {0.0, 0.75, -0.3333333333333333, -0.5}};
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 4; ++j) CHECK(enc.matrix.rows(k, j) == doctest::Approx(expected[k][j]).epsilon(1e-12));
  CHECK(enc.buckets[0].size() == 5);  // 3 unigrams + 2 bigrams
}

TEST_CASE("encode_segments edge cases") {
  HashEncoderConfig cfg;
  cfg.buckets = 1;
  cfg.dim = 3;
  HashEncoderParams p;
  p.table = Matrix(1, 3);
  p.table << 1.5, -2.0, 0.25;
  const std::vector<Segment> segs{seg({"x", "y", "z"}), seg({"q"})};
  const auto enc = encode_segments(segs, cfg, p);
  for (int k = 0; k < 2; ++k) CHECK((enc.matrix.rows.row(k) - p.table.row(0)).norm() < 1e-15);

  cfg.buckets = 64;
  HashEncoderParams zero{Matrix::Zero(64, 3)};
  CHECK(encode_segments(segs, cfg, zero).matrix.rows.isZero(0.0));

  // a single-token segment with bigrams only falls back to the whole token list
  cfg.ngram_orders = {2};
  const std::vector<Segment> one{seg({"solo"})};
  CHECK(encode_segments(one, cfg, zero).buckets[0].size() == 1);

  CHECK_THROWS_AS(encode_segments(std::vector<Segment>{}, cfg, zero), ValidationError);
  CHECK_THROWS_AS(encode_segments(segs, cfg, HashEncoderParams{Matrix::Zero(8, 3)}), ConfigError);
}

TEST_CASE("encoder gradient matches finite differences") {
  ModelConfig cfg;
  cfg.hash.buckets = 32;
  cfg.hash.dim = 6;
  cfg.num_labels = 2;
  cfg.pooling = PoolingStrategy::Sum;
  const auto params = init_params(cfg, 3);
  Example ex;
  ex.doc_id = "d";
  ex.segments = {seg({"a", "b", "c"}, 0), seg({"c", "d"}, 1), seg({"e"}, 2)};
  ex.gold = {0, 1};
  const auto report = grad_check(cfg, params, std::span<const Example>(&ex, 1));
  CHECK(report.passed());
  CHECK(report.max_rel_error < 1e-4);
  CHECK(report.checked > 32 * 6);
}

TEST_CASE("precomputed vectors sidecar") {
  std::istringstream ok(R"({"h": 8}
{"doc_id": "d", "vectors": [[1,2,3,4,5,6,7,8],[0,0,0,0,0,0,0,0],[-1,-1,-1,-1,-1,-1,-1,-1.5]]}
)");
  const auto vecs = parse_precomputed(ok);
  REQUIRE(vecs.size() == 1);
  const auto& m = vecs.at("d");
  CHECK(m.m() == 3);
  CHECK(m.h() == 8);
  CHECK(m.rows(2, 7) == -1.5);
  CHECK_THROWS_AS(vecs.at("missing"), LookupError);

  std::istringstream ragged(R"({"h": 8}
{"doc_id": "d", "vectors": [[1,2,3,4,5,6,7,8],[1,2,3,4,5,6,7,8,9]]}
)");
  CHECK_THROWS_AS(parse_precomputed(ragged), FormatError);

  std::istringstream no_header(R"({"doc_id": "d", "vectors": [[1]]})");
  CHECK_THROWS_AS(parse_precomputed(no_header), FormatError);

  std::istringstream empty("");
  const auto none = parse_precomputed(empty);
  CHECK(none.size() == 0);
  CHECK_THROWS_AS(none.at("d"), LookupError);

  std::stringstream io;
  write_precomputed(io, vecs);
  const auto back = parse_precomputed(io);
  CHECK(back.at("d").rows == m.rows);
}
