#include "swipe/model.hpp"

#include <cmath>

#include "swipe/error.hpp"
#include "swipe/loss.hpp"

namespace swipe {

std::string_view to_string(EncoderMode mode) {
  return mode == EncoderMode::Hashed ? "hashed" : "precomputed";
}

EncoderMode parse_encoder_mode(std::string_view text) {
  if (text == "hashed") return EncoderMode::Hashed;
  if (text == "precomputed") return EncoderMode::Precomputed;
  throw ConfigError("unknown encoder mode '" + std::string(text) + "'");
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Auto: return "auto";
    case LossKind::Softmax: return "softmax";
    case LossKind::Logistic: return "logistic";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "auto") return LossKind::Auto;
  if (text == "softmax") return LossKind::Softmax;
  if (text == "logistic") return LossKind::Logistic;
  throw ConfigError("unknown loss '" + std::string(text) + "'");
}

void ModelConfig::validate() const {
  if (encoder_mode == EncoderMode::Hashed) hash.validate();
  if (hidden_dim() == 0) throw ConfigError("hidden dimension must be >= 1");
  if (num_labels == 0) throw ConfigError("model needs at least one label");
  if (task_kind == TaskKind::MultiClass && num_labels < 2)
    throw ConfigError("multi-class model needs at least two labels");
  if (task_kind == TaskKind::MultiLabel && loss == LossKind::Softmax)
    throw ConfigError("softmax loss needs a multi-class task");
  if (interaction.num_layers > 0 &&
      (interaction.heads == 0 || hidden_dim() % interaction.heads != 0))
    throw ConfigError("hidden size " + std::to_string(hidden_dim()) + " is not divisible by " +
                      std::to_string(interaction.heads) + " attention heads");
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams params;
  if (cfg.encoder_mode == EncoderMode::Hashed) {
    Rng rng(sub_seed(seed, "init.encoder"));
    params.encoder = init_hash_encoder(cfg.hash, rng);
  }
  Rng irng(sub_seed(seed, "init.interaction"));
  params.interaction = init_interaction(cfg.interaction, cfg.hidden_dim(), irng);
  Rng hrng(sub_seed(seed, "init.head"));
  params.head = init_swipe(cfg.num_labels, cfg.hidden_dim(), hrng);
  return params;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out;
  out.encoder.table = Matrix::Zero(params.encoder.table.rows(), params.encoder.table.cols());
  out.interaction = zeros_like(params.interaction);
  out.head = zeros_like(params.head);
  return out;
}

namespace {

template <typename View, typename Tensor>
void add_view(std::vector<View>& views, std::string name, Tensor& t) {
  if (t.size() == 0) return;
  views.push_back({std::move(name), {t.data(), static_cast<std::size_t>(t.size())},
                   static_cast<std::size_t>(t.rows()), static_cast<std::size_t>(t.cols())});
}

template <typename View, typename Params>
std::vector<View> collect_views(Params& params) {
  std::vector<View> views;
  add_view(views, "encoder.table", params.encoder.table);
  for (std::size_t l = 0; l < params.interaction.layers.size(); ++l) {
    auto& p = params.interaction.layers[l];
    const std::string prefix = "interaction." + std::to_string(l) + ".";
    add_view(views, prefix + "ln1_gain", p.ln1_gain);
    add_view(views, prefix + "ln1_bias", p.ln1_bias);
    add_view(views, prefix + "wq", p.wq);
    add_view(views, prefix + "wk", p.wk);
    add_view(views, prefix + "wv", p.wv);
    add_view(views, prefix + "wo", p.wo);
    add_view(views, prefix + "ln2_gain", p.ln2_gain);
    add_view(views, prefix + "ln2_bias", p.ln2_bias);
    add_view(views, prefix + "w1", p.w1);
    add_view(views, prefix + "c1", p.c1);
    add_view(views, prefix + "w2", p.w2);
    add_view(views, prefix + "c2", p.c2);
  }
  add_view(views, "interaction.positions", params.interaction.positions);
  add_view(views, "head.w", params.head.w);
  add_view(views, "head.b", params.head.b);
  add_view(views, "head.wg", params.head.wg);
  add_view(views, "head.bg", params.head.bg);
  return views;
}

}  // namespace

std::vector<ParamView> param_views(ModelParams& params) { return collect_views<ParamView>(params); }

std::vector<ConstParamView> param_views(const ModelParams& params) {
  return collect_views<ConstParamView>(params);
}

std::vector<Example> make_examples(const Corpus& corpus, std::span<const Document* const> docs,
                                   const TruncationConfig& truncation,
                                   const PrecomputedVectors* vectors) {
  std::vector<Example> out;
  out.reserve(docs.size());
  for (const Document* doc : docs) {
    Example ex;
    ex.doc_id = doc->id;
    if (vectors) {
      ex.vectors = vectors->at(doc->id);
    } else {
      ex.segments = truncate(*doc, truncation);
    }
    ex.gold = corpus.label_bits(*doc);
    out.push_back(std::move(ex));
  }
  return out;
}

ForwardState forward(const ModelConfig& cfg, const ModelParams& params, const Example& example) {
  ForwardState state;
  if (cfg.encoder_mode == EncoderMode::Hashed) {
    if (example.segments.empty())
      throw ValidationError("example '" + example.doc_id + "' has no segments");
    state.encoded = encode_segments(example.segments, cfg.hash, params.encoder);
    state.input = state.encoded->matrix;
  } else {
    if (!example.vectors)
      throw ConfigError("precomputed-vector model given an example without vectors");
    state.input = *example.vectors;
    if (state.input.h() != cfg.precomputed_dim)
      throw ConfigError("vector dimension " + std::to_string(state.input.h()) +
                        " does not match the model's h = " + std::to_string(cfg.precomputed_dim));
  }
  state.input.doc_id = example.doc_id;
  state.scored = interact(state.input, cfg.interaction, params.interaction, &state.interaction);
  state.z = segment_scores(state.scored, params.head);
  if (is_gated(cfg.pooling)) state.g = segment_gates(state.scored, params.head);
  state.pooled = pool(state.z, state.g ? &*state.g : nullptr, cfg.pooling);
  return state;
}

Prediction to_prediction(const ModelConfig& cfg, const ForwardState& state, const std::string& doc_id) {
  return make_prediction(doc_id, state.z, state.g, state.pooled, cfg.pooling);
}

Prediction predict(const ModelConfig& cfg, const ModelParams& params, const Example& example) {
  return to_prediction(cfg, forward(cfg, params, example), example.doc_id);
}

LossResult example_loss(const ModelConfig& cfg, const Vector& y, std::span<const int> gold) {
  if (cfg.resolved_loss() == LossKind::Softmax) {
    std::size_t gold_class = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i)
      if (gold[i]) gold_class = i;
    return loss_multiclass(y, gold_class);
  }
  return loss_multilabel(y, gold);
}

void backward(const ModelConfig& cfg, const ModelParams& params, const ForwardState& state,
              const Vector& d_y, ModelParams& grads) {
  const auto& head = params.head;
  Matrix d_z = Matrix::Zero(state.z.rows(), state.z.cols());
  std::optional<Matrix> d_g;
  if (state.g) d_g = Matrix::Zero(state.z.rows(), state.z.cols());
  pool_backward(state.z, state.g ? &*state.g : nullptr, state.pooled, cfg.pooling, d_y, d_z,
                d_g ? &*d_g : nullptr);

  // z = W S^T + b
  grads.head.w += d_z * state.scored.rows;
  grads.head.b += d_z.rowwise().sum();
  Matrix d_scored = d_z.transpose() * head.w;
  if (state.g) {
    // g = sigmoid(Wg S^T + bg)
    const Matrix d_pre = d_g->array() * state.g->array() * (1.0 - state.g->array());
    grads.head.wg += d_pre * state.scored.rows;
    grads.head.bg += d_pre.rowwise().sum();
    d_scored += d_pre.transpose() * head.wg;
  }

  const Matrix d_input =
      interact_backward(cfg.interaction, params.interaction, state.interaction, d_scored, grads.interaction);
  if (state.encoded) encode_segments_backward(*state.encoded, d_input, grads.encoder.table);
}

double batch_loss(const ModelConfig& cfg, const ModelParams& params, std::span<const Example> batch,
                  ModelParams* grads) {
  if (batch.empty()) throw ValidationError("empty batch");
  if (grads) *grads = zeros_like(params);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& ex : batch) {
    const ForwardState state = forward(cfg, params, ex);
    const LossResult loss = example_loss(cfg, state.pooled.y, ex.gold);
    if (!std::isfinite(loss.value))
      throw TrainingError("non-finite loss on document '" + ex.doc_id + "'");
    total += loss.value;
    if (grads) backward(cfg, params, state, loss.d_y * scale, *grads);
  }
  return total * scale;
}

}  // namespace swipe
