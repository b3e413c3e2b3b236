#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace swipe {

enum class TaskKind { MultiClass, MultiLabel };
enum class Split { Train, Dev, Test };

std::string_view to_string(TaskKind kind);
std::string_view to_string(Split split);
TaskKind parse_task_kind(std::string_view text);
Split parse_split(std::string_view text);

struct Document {
  std::string id;
  std::string text;
  // Pre-segmented structural units such as dialogue turns.
  std::optional<std::vector<std::string>> units;
  std::vector<std::string> labels;
  // Explicit tag from the source file; untagged documents count as train.
  std::optional<Split> split;

  // Text used downstream: `text` when present, otherwise the units joined by
  // newlines.
  std::string content() const;
  bool has_units() const { return units.has_value() && !units->empty(); }
};

class LabelVocab {
 public:
  LabelVocab() = default;
  LabelVocab(std::vector<std::string> names, TaskKind kind);

  std::size_t size() const { return names_.size(); }
  TaskKind task_kind() const { return kind_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }

  std::optional<std::size_t> find(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;  // throws LookupError

  // Appends when unseen; returns the label's index.
  std::size_t add(const std::string& label);

  void validate() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  TaskKind kind_ = TaskKind::MultiClass;
};

struct Corpus {
  std::vector<Document> documents;
  LabelVocab vocab;

  Split split_of(const Document& doc) const { return doc.split.value_or(Split::Train); }
  std::vector<const Document*> in_split(Split split) const;
  const Document& find(std::string_view id) const;  // throws LookupError

  // L-length 0/1 vector over the vocabulary.
  std::vector<int> label_bits(const Document& doc) const;
  // Gold class for multi-class corpora.
  std::size_t gold_class(const Document& doc) const;
};

// Checks every Document/LabelVocab/Corpus invariant; throws ValidationError.
void validate_corpus(const Corpus& corpus);

Corpus parse_jsonl(std::istream& in, TaskKind kind);
Corpus load_jsonl(const std::filesystem::path& path, TaskKind kind);
void write_jsonl(std::ostream& out, const Corpus& corpus);
void write_jsonl(const std::filesystem::path& path, const Corpus& corpus);

// Assigns a split to every document without an explicit tag. Counts are
// round(f * n) for train and dev; test takes the remainder.
Corpus split_corpus(Corpus corpus, std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace swipe
