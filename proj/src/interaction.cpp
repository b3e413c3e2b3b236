#include "swipe/interaction.hpp"

#include <cmath>

#include "swipe/error.hpp"

namespace swipe {

namespace {

constexpr double kLayerNormEps = 1e-5;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = scale * standard_normal(rng);
  return out;
}

// Row-wise layer norm; keeps xhat and 1/std for backward.
Matrix layer_norm(const Matrix& x, const Vector& gain, const Vector& bias, Matrix& xhat,
                  Vector& inv_std) {
  const auto h = static_cast<double>(x.cols());
  xhat.resize(x.rows(), x.cols());
  inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).sum() / h;
    const auto centered = (x.row(r).array() - mu).matrix();
    const double var = centered.squaredNorm() / h;
    inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = centered * inv_std(r);
  }
  Matrix out = xhat.array().rowwise() * gain.transpose().array();
  out.rowwise() += bias.transpose();
  return out;
}

Matrix layer_norm_backward(const Matrix& d_out, const Matrix& xhat, const Vector& inv_std,
                           const Vector& gain, Vector& d_gain, Vector& d_bias) {
  d_gain += (d_out.array() * xhat.array()).colwise().sum().transpose().matrix();
  d_bias += d_out.colwise().sum().transpose();
  const Matrix d_xhat = d_out.array().rowwise() * gain.transpose().array();
  const auto h = static_cast<double>(d_out.cols());
  Matrix d_x(d_out.rows(), d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const double mean_d = d_xhat.row(r).sum() / h;
    const double mean_dx = d_xhat.row(r).dot(xhat.row(r)) / h;
    d_x.row(r) = inv_std(r) * (d_xhat.row(r).array() - mean_d - xhat.row(r).array() * mean_dx).matrix();
  }
  return d_x;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return cdf + x * pdf;
}

void check_shapes(const SegmentMatrix& input, const InteractionConfig& cfg,
                  const InteractionParams& params) {
  const auto h = input.h();
  if (cfg.heads == 0 || h % cfg.heads != 0)
    throw ConfigError("hidden size " + std::to_string(h) + " is not divisible by " +
                      std::to_string(cfg.heads) + " attention heads");
  if (params.layers.size() < cfg.num_layers)
    throw ConfigError("interaction params hold fewer layers than configured");
  for (std::size_t l = 0; l < cfg.num_layers; ++l)
    if (static_cast<std::size_t>(params.layers[l].wq.rows()) != h)
      throw ConfigError("interaction layer dimension does not match the segment vectors");
  if (cfg.positions) {
    if (static_cast<std::size_t>(params.positions.cols()) != h)
      throw ConfigError("position table dimension does not match the segment vectors");
    if (input.m() > static_cast<std::size_t>(params.positions.rows()))
      throw ConfigError("document has " + std::to_string(input.m()) +
                        " segments, position table holds " +
                        std::to_string(params.positions.rows()));
  }
}

}  // namespace

InteractionParams init_interaction(const InteractionConfig& cfg, std::size_t h, Rng& rng) {
  if (cfg.num_layers > 0 && (cfg.heads == 0 || h % cfg.heads != 0))
    throw ConfigError("hidden size " + std::to_string(h) + " is not divisible by " +
                      std::to_string(cfg.heads) + " attention heads");
  const auto hh = static_cast<Eigen::Index>(h);
  const auto f = static_cast<Eigen::Index>(cfg.ff_for(h));
  const double s_h = 1.0 / std::sqrt(static_cast<double>(h));
  const double s_f = 1.0 / std::sqrt(static_cast<double>(f));

  InteractionParams params;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    InteractionLayer layer;
    layer.ln1_gain = Vector::Ones(hh);
    layer.ln1_bias = Vector::Zero(hh);
    layer.wq = gaussian(hh, hh, s_h, rng);
    layer.wk = gaussian(hh, hh, s_h, rng);
    layer.wv = gaussian(hh, hh, s_h, rng);
    layer.wo = gaussian(hh, hh, s_h, rng);
    layer.ln2_gain = Vector::Ones(hh);
    layer.ln2_bias = Vector::Zero(hh);
    layer.w1 = gaussian(hh, f, s_h, rng);
    layer.c1 = Vector::Zero(f);
    layer.w2 = gaussian(f, hh, s_f, rng);
    layer.c2 = Vector::Zero(hh);
    params.layers.push_back(std::move(layer));
  }
  if (cfg.positions)
    params.positions = gaussian(static_cast<Eigen::Index>(cfg.max_positions), hh, 0.02, rng);
  return params;
}

InteractionParams zeros_like(const InteractionParams& params) {
  InteractionParams out;
  for (const auto& l : params.layers) {
    InteractionLayer z;
    z.ln1_gain = Vector::Zero(l.ln1_gain.size());
    z.ln1_bias = Vector::Zero(l.ln1_bias.size());
    z.wq = Matrix::Zero(l.wq.rows(), l.wq.cols());
    z.wk = Matrix::Zero(l.wk.rows(), l.wk.cols());
    z.wv = Matrix::Zero(l.wv.rows(), l.wv.cols());
    z.wo = Matrix::Zero(l.wo.rows(), l.wo.cols());
    z.ln2_gain = Vector::Zero(l.ln2_gain.size());
    z.ln2_bias = Vector::Zero(l.ln2_bias.size());
    z.w1 = Matrix::Zero(l.w1.rows(), l.w1.cols());
    z.c1 = Vector::Zero(l.c1.size());
    z.w2 = Matrix::Zero(l.w2.rows(), l.w2.cols());
    z.c2 = Vector::Zero(l.c2.size());
    out.layers.push_back(std::move(z));
  }
  out.positions = Matrix::Zero(params.positions.rows(), params.positions.cols());
  return out;
}

SegmentMatrix interact(const SegmentMatrix& input, const InteractionConfig& cfg,
                       const InteractionParams& params, InteractionCache* cache) {
  if (cfg.num_layers == 0 && !cfg.positions) {
    if (cache) *cache = InteractionCache{{}, input.m()};
    return input;
  }
  check_shapes(input, cfg, params);

  const auto m = static_cast<Eigen::Index>(input.m());
  const auto h = static_cast<Eigen::Index>(input.h());
  const auto heads = static_cast<Eigen::Index>(cfg.heads);
  const Eigen::Index d = h / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  Matrix x = input.rows;
  if (cfg.positions) x += params.positions.topRows(m);

  if (cache) {
    cache->layers.clear();
    cache->m = input.m();
  }
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    const auto& p = params.layers[l];
    InteractionCache::LayerCache c;
    c.x = x;
    c.u1 = layer_norm(x, p.ln1_gain, p.ln1_bias, c.xhat1, c.inv_std1);
    c.q = c.u1 * p.wq;
    c.k = c.u1 * p.wk;
    c.v = c.u1 * p.wv;
    c.attn.resize(m, h);
    for (Eigen::Index a = 0; a < heads; ++a) {
      Matrix scores = c.q.middleCols(a * d, d) * c.k.middleCols(a * d, d).transpose() * scale;
      for (Eigen::Index r = 0; r < m; ++r) {
        const double mx = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - mx).exp().matrix();
        scores.row(r) /= scores.row(r).sum();
      }
      c.attn.middleCols(a * d, d) = scores * c.v.middleCols(a * d, d);
      c.probs.push_back(std::move(scores));
    }
    c.x1 = x + c.attn * p.wo;
    c.u2 = layer_norm(c.x1, p.ln2_gain, p.ln2_bias, c.xhat2, c.inv_std2);
    c.pre = (c.u2 * p.w1).rowwise() + p.c1.transpose();
    c.act = c.pre.unaryExpr([](double v) { return gelu(v); });
    Matrix out = c.x1 + c.act * p.w2;
    out.rowwise() += p.c2.transpose();
    x = std::move(out);
    if (cache) cache->layers.push_back(std::move(c));
  }
  return SegmentMatrix{input.doc_id, std::move(x)};
}

Matrix interact_backward(const InteractionConfig& cfg, const InteractionParams& params,
                         const InteractionCache& cache, const Matrix& d_output,
                         InteractionParams& grads) {
  Matrix dx = d_output;
  const auto heads = static_cast<Eigen::Index>(cfg.heads);

  for (std::size_t li = cache.layers.size(); li-- > 0;) {
    const auto& p = params.layers[li];
    auto& g = grads.layers[li];
    const auto& c = cache.layers[li];
    const Eigen::Index h = c.x.cols();
    const Eigen::Index d = h / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    // feed-forward block: out = x1 + gelu(u2 W1 + c1) W2 + c2
    g.c2 += dx.colwise().sum().transpose();
    g.w2 += c.act.transpose() * dx;
    const Matrix d_act = dx * p.w2.transpose();
    const Matrix d_pre = d_act.array() * c.pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
    g.c1 += d_pre.colwise().sum().transpose();
    g.w1 += c.u2.transpose() * d_pre;
    const Matrix d_u2 = d_pre * p.w1.transpose();
    Matrix d_x1 = dx + layer_norm_backward(d_u2, c.xhat2, c.inv_std2, p.ln2_gain, g.ln2_gain, g.ln2_bias);

    // attention block: x1 = x + attn Wo
    g.wo += c.attn.transpose() * d_x1;
    const Matrix d_attn = d_x1 * p.wo.transpose();
    Matrix d_q(c.q.rows(), h), d_k(c.k.rows(), h), d_v(c.v.rows(), h);
    for (Eigen::Index a = 0; a < heads; ++a) {
      const Matrix& probs = c.probs[static_cast<std::size_t>(a)];
      const auto d_head = d_attn.middleCols(a * d, d);
      const Matrix d_probs = d_head * c.v.middleCols(a * d, d).transpose();
      d_v.middleCols(a * d, d) = probs.transpose() * d_head;
      Matrix d_scores(probs.rows(), probs.cols());
      for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        const double dot = d_probs.row(r).dot(probs.row(r));
        d_scores.row(r) = probs.row(r).array() * (d_probs.row(r).array() - dot);
      }
      d_q.middleCols(a * d, d) = d_scores * c.k.middleCols(a * d, d) * scale;
      d_k.middleCols(a * d, d) = d_scores.transpose() * c.q.middleCols(a * d, d) * scale;
    }
    g.wq += c.u1.transpose() * d_q;
    g.wk += c.u1.transpose() * d_k;
    g.wv += c.u1.transpose() * d_v;
    const Matrix d_u1 = d_q * p.wq.transpose() + d_k * p.wk.transpose() + d_v * p.wv.transpose();
    dx = d_x1 + layer_norm_backward(d_u1, c.xhat1, c.inv_std1, p.ln1_gain, g.ln1_gain, g.ln1_bias);
  }

  if (cfg.positions) grads.positions.topRows(dx.rows()) += dx;
  return dx;
}

}  // namespace swipe
