#pragma once

#include <filesystem>
#include <iosfwd>

#include "swipe/corpus.hpp"
#include "swipe/model.hpp"
#include "swipe/trainer.hpp"
#include "swipe/truncator.hpp"

namespace swipe {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  TruncationConfig truncation;
  LabelVocab vocab;
  ModelParams params;
  std::size_t trained_steps = 0;
};

// Layout (text, documented in docs/checkpoint_format.md):
//   line 1: "swipe-checkpoint <version>"
//   line 2: one JSON object with configs, labels and the tensor table
//   then per tensor: "tensor <name> <rows> <cols>" and rows*cols hexfloat
//   values in column-major order, whitespace separated.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace swipe
