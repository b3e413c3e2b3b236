#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swipe/corpus.hpp"

namespace swipe {

struct CountRange {
  std::size_t min = 1;
  std::size_t max = 1;
};

// Planted-key-segment corpus. Each positive (document, label) pair gets
// `key_segments_per_label` segments carrying tokens from that label's
// exclusive vocabulary; every other segment is filler only.
struct SyntheticSpec {
  std::size_t num_docs = 500;
  std::size_t num_labels = 2;
  CountRange segments_per_doc{8, 8};
  std::size_t key_vocab_per_label = 20;
  std::size_t filler_vocab = 300;
  CountRange tokens_per_segment{12, 20};
  std::size_t key_tokens_per_segment = 2;
  std::size_t key_segments_per_label = 1;
  // Multi-label only: chance that a document carries each label.
  double label_probability = 0.4;
  TaskKind task_kind = TaskKind::MultiClass;
  std::uint64_t seed = 13;
};

// (doc id, label index) -> gold key segment indices, sorted ascending.
class KeyMap {
 public:
  using Key = std::pair<std::string, std::size_t>;

  void set(const std::string& doc_id, std::size_t label, std::vector<std::size_t> segments);
  const std::vector<std::size_t>* find(const std::string& doc_id, std::size_t label) const;
  bool is_key(const std::string& doc_id, std::size_t label, std::size_t segment) const;
  const std::map<Key, std::vector<std::size_t>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<Key, std::vector<std::size_t>> entries_;
};

struct SyntheticCorpus {
  Corpus corpus;
  KeyMap key_map;
};

std::string synthetic_key_token(std::size_t label, std::size_t index);
std::string synthetic_filler_token(std::size_t index);

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Sidecar JSONL: {"doc_id": ..., "label": <name>, "key_segments": [int...]}.
void write_keymap(std::ostream& out, const KeyMap& keys, const LabelVocab& vocab);
void write_keymap(const std::filesystem::path& path, const KeyMap& keys, const LabelVocab& vocab);
KeyMap parse_keymap(std::istream& in, const LabelVocab& vocab);
KeyMap load_keymap(const std::filesystem::path& path, const LabelVocab& vocab);

}  // namespace swipe
