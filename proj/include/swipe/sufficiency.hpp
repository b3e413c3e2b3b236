#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swipe/corpus.hpp"
#include "swipe/model.hpp"
#include "swipe/trainer.hpp"
#include "swipe/truncator.hpp"

namespace swipe {

struct TrainedModel {
  ModelConfig config;
  ModelParams params;
  std::size_t trained_steps = 0;
};

// The probe is a hashed n-gram mean embedding with a plain linear head: a
// single-segment SWIPE with sum pooling, which reduces to a linear model.
struct SufficiencyOptions {
  std::vector<TruncationConfig> settings;
  HashEncoderConfig probe_encoder{1 << 14, 32, {1, 2}, 0x5319e};
  TrainConfig probe_train{10, 5e-3, 16, 0, {}};
  std::uint64_t seed = 0;
};

struct SufficiencyRow {
  std::string setting;
  double explanation = 0.0;  // probe trained on SWIPE key segments
  double random = 0.0;       // probe trained on uniformly chosen segments
  double full_text = 0.0;    // probe trained on whole documents
};

struct SufficiencyReport {
  std::vector<SufficiencyRow> rows;
};

std::string describe(const TruncationConfig& cfg);

// For each setting: re-truncate, classify with the trained model, keep the
// top-1 key segment per decided label (the top-ranked segment even when no
// segment scores positive), then train and test fresh probes on
// explanations, random segments and full text. Train split trains, dev
// split selects, test split scores. Throws ValidationError if the model
// was never trained.
SufficiencyReport sufficiency_test(const Corpus& corpus, const TrainedModel& model,
                                   const SufficiencyOptions& options,
                                   const PrecomputedVectors* vectors = nullptr);

}  // namespace swipe
