#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swipe/corpus.hpp"
#include "swipe/hash_encoder.hpp"
#include "swipe/head.hpp"
#include "swipe/interaction.hpp"
#include "swipe/loss.hpp"
#include "swipe/precomputed.hpp"
#include "swipe/truncator.hpp"

namespace swipe {

enum class EncoderMode { Hashed, Precomputed };

std::string_view to_string(EncoderMode mode);
EncoderMode parse_encoder_mode(std::string_view text);

// Auto: softmax cross-entropy for multi-class, per-label logistic loss for
// multi-label. Logistic on a multi-class corpus treats each document's one
// label as a one-of-L label set; decisions still use argmax y.
enum class LossKind { Auto, Softmax, Logistic };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);

struct ModelConfig {
  EncoderMode encoder_mode = EncoderMode::Hashed;
  HashEncoderConfig hash;
  std::size_t precomputed_dim = 0;  // h of the vector sidecar
  InteractionConfig interaction;
  PoolingStrategy pooling = PoolingStrategy::Max;
  TaskKind task_kind = TaskKind::MultiClass;
  LossKind loss = LossKind::Auto;
  std::size_t num_labels = 2;

  LossKind resolved_loss() const {
    if (loss != LossKind::Auto) return loss;
    return task_kind == TaskKind::MultiClass ? LossKind::Softmax : LossKind::Logistic;
  }
  std::size_t hidden_dim() const {
    return encoder_mode == EncoderMode::Hashed ? hash.dim : precomputed_dim;
  }
  void validate() const;
};

struct ModelParams {
  HashEncoderParams encoder;  // empty table in precomputed mode
  InteractionParams interaction;
  SwipeParams head;
};

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);
ModelParams zeros_like(const ModelParams& params);

// View over one parameter tensor (column-major storage).
template <typename T>
struct BasicParamView {
  std::string name;
  std::span<T> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};
using ParamView = BasicParamView<double>;
using ConstParamView = BasicParamView<const double>;

// Every non-empty tensor, in a fixed order shared by parameters, gradients
// and optimizer moments of the same shape.
std::vector<ParamView> param_views(ModelParams& params);
std::vector<ConstParamView> param_views(const ModelParams& params);

struct Example {
  std::string doc_id;
  std::vector<Segment> segments;
  std::optional<SegmentMatrix> vectors;  // precomputed mode
  std::vector<int> gold;                 // L-length 0/1
};

std::vector<Example> make_examples(const Corpus& corpus, std::span<const Document* const> docs,
                                   const TruncationConfig& truncation,
                                   const PrecomputedVectors* vectors);

struct ForwardState {
  std::optional<EncodedSegments> encoded;  // hashed mode
  SegmentMatrix input;                     // encoder output
  InteractionCache interaction;
  SegmentMatrix scored;                    // after interaction
  Matrix z;
  std::optional<Matrix> g;
  PoolResult pooled;
};

ForwardState forward(const ModelConfig& cfg, const ModelParams& params, const Example& example);
Prediction predict(const ModelConfig& cfg, const ModelParams& params, const Example& example);
Prediction to_prediction(const ModelConfig& cfg, const ForwardState& state, const std::string& doc_id);

LossResult example_loss(const ModelConfig& cfg, const Vector& y, std::span<const int> gold);

// Accumulates d(loss)/d(params) into grads given d(loss)/dy.
void backward(const ModelConfig& cfg, const ModelParams& params, const ForwardState& state,
              const Vector& d_y, ModelParams& grads);

// Mean loss over the batch; when grads is non-null it is overwritten with the
// gradient of that mean. Throws TrainingError on a non-finite loss.
double batch_loss(const ModelConfig& cfg, const ModelParams& params,
                  std::span<const Example> batch, ModelParams* grads);

}  // namespace swipe
