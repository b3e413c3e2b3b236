#include <doctest.h>

#include "swipe/error.hpp"
#include "swipe/grad_check.hpp"
#include "swipe/interaction.hpp"
#include "test_util.hpp"

using namespace swipe;
using swipe::testing::random_matrix;

namespace {

InteractionConfig two_layers(bool positions = false) {
  InteractionConfig cfg;
  cfg.num_layers = 2;
  cfg.heads = 2;
  cfg.positions = positions;
  cfg.max_positions = 8;
  return cfg;
}

// Random layer norm gains/biases so their gradients are non-trivial.
void perturb_norms(InteractionParams& p, Rng& rng) {
  for (auto& l : p.layers) {
    l.ln1_gain += swipe::testing::random_vector(l.ln1_gain.size(), rng, 0.3);
    l.ln1_bias += swipe::testing::random_vector(l.ln1_bias.size(), rng, 0.3);
    l.ln2_gain += swipe::testing::random_vector(l.ln2_gain.size(), rng, 0.3);
    l.ln2_bias += swipe::testing::random_vector(l.ln2_bias.size(), rng, 0.3);
    l.c1 += swipe::testing::random_vector(l.c1.size(), rng, 0.3);
    l.c2 += swipe::testing::random_vector(l.c2.size(), rng, 0.3);
  }
}

}  // namespace

TEST_CASE("zero layers is the identity") {
  Rng rng(1);
  const SegmentMatrix in{"d", random_matrix(4, 6, rng)};
  InteractionConfig cfg;
  const auto out = interact(in, cfg, {});
  CHECK(out.rows == in.rows);
}

TEST_CASE("single segment keeps its shape and stays finite") {
  Rng rng(2);
  const auto cfg = two_layers();
  const auto params = init_interaction(cfg, 6, rng);
  const SegmentMatrix in{"d", random_matrix(1, 6, rng)};
  const auto out = interact(in, cfg, params);
  CHECK(out.m() == 1);
  CHECK(out.h() == 6);
  CHECK(out.rows.allFinite());
}

TEST_CASE("without positions interaction is permutation equivariant") {
  Rng rng(3);
  const auto cfg = two_layers();
  const auto params = init_interaction(cfg, 8, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(uniform_index(rng, 5));
    const SegmentMatrix in{"d", random_matrix(m, 8, rng)};
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = i;
    shuffle_in_place(perm, rng);
    SegmentMatrix permuted{"d", Matrix(m, 8)};
    for (Eigen::Index i = 0; i < m; ++i) permuted.rows.row(i) = in.rows.row(perm[static_cast<std::size_t>(i)]);

    const auto out = interact(in, cfg, params);
    const auto out_p = interact(permuted, cfg, params);
    for (Eigen::Index i = 0; i < m; ++i)
      CHECK((out_p.rows.row(i) - out.rows.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("positions break permutation symmetry") {
  Rng rng(4);
  auto cfg = two_layers(true);
  auto params = init_interaction(cfg, 4, rng);
  params.positions *= 50.0;
  Matrix rows = random_matrix(3, 4, rng);
  Matrix swapped = rows;
  swapped.row(0).swap(swapped.row(1));
  const auto a = interact({"d", rows}, cfg, params);
  const auto b = interact({"d", swapped}, cfg, params);
  CHECK((a.rows.row(0) - b.rows.row(1)).norm() > 1e-3);
}

TEST_CASE("interaction rejects mismatched shapes") {
  Rng rng(5);
  auto cfg = two_layers(true);
  const auto params = init_interaction(cfg, 4, rng);
  CHECK_THROWS_AS(interact({"d", random_matrix(2, 6, rng)}, cfg, params), ConfigError);
  CHECK_THROWS_AS(interact({"d", random_matrix(9, 4, rng)}, cfg, params), ConfigError);
  cfg.heads = 3;
  CHECK_THROWS_AS(interact({"d", random_matrix(2, 4, rng)}, cfg, params), ConfigError);
  CHECK_THROWS_AS(init_interaction(cfg, 4, rng), ConfigError);
}

TEST_CASE("interaction input gradient matches finite differences") {
  Rng rng(6);
  for (bool positions : {false, true}) {
    const auto cfg = two_layers(positions);
    auto params = init_interaction(cfg, 4, rng);
    perturb_norms(params, rng);
    Matrix x = random_matrix(3, 4, rng);
    const Matrix weight = random_matrix(3, 4, rng);  // loss = sum(weight .* out)

    InteractionCache cache;
    interact({"d", x}, cfg, params, &cache);
    auto grads = zeros_like(params);
    const Matrix d_x = interact_backward(cfg, params, cache, weight, grads);

    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double orig = x.data()[i];
      const double h = 1e-5;
      x.data()[i] = orig + h;
      const double plus = (interact({"d", x}, cfg, params).rows.array() * weight.array()).sum();
      x.data()[i] = orig - h;
      const double minus = (interact({"d", x}, cfg, params).rows.array() * weight.array()).sum();
      x.data()[i] = orig;
      const double numeric = (plus - minus) / (2 * h);
      CHECK(std::abs(numeric - d_x.data()[i]) <= 1e-6 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST_CASE("interaction parameter gradients match finite differences") {
  ModelConfig cfg;
  cfg.encoder_mode = EncoderMode::Precomputed;
  cfg.precomputed_dim = 4;
  cfg.num_labels = 3;
  cfg.task_kind = TaskKind::MultiLabel;
  cfg.pooling = PoolingStrategy::GatedSum;
  cfg.interaction = two_layers(true);
  auto params = init_params(cfg, 11);
  Rng rng(12);
  perturb_norms(params.interaction, rng);

  std::vector<Example> batch;
  for (int d = 0; d < 2; ++d) {
    Example ex;
    ex.doc_id = "d" + std::to_string(d);
    ex.vectors = SegmentMatrix{ex.doc_id, random_matrix(2 + d, 4, rng)};
    ex.gold = {1, 0, d};
    batch.push_back(std::move(ex));
  }
  const auto report = grad_check(cfg, params, batch);
  CHECK(report.passed());
  CHECK(report.max_rel_error < 1e-4);
  CHECK(report.excluded == 0);
}
