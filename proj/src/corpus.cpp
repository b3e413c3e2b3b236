#include "swipe/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swipe/error.hpp"
#include "swipe/rng.hpp"

namespace swipe {

using nlohmann::json;

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::MultiClass ? "multi-class" : "multi-label";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "multi-class" || text == "multiclass") return TaskKind::MultiClass;
  if (text == "multi-label" || text == "multilabel") return TaskKind::MultiLabel;
  throw ConfigError("unknown task kind '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "dev") return Split::Dev;
  if (text == "test") return Split::Test;
  throw ValidationError("unknown split '" + std::string(text) + "'");
}

std::string Document::content() const {
  if (!text.empty() || !units) return text;
  std::string joined;
  for (std::size_t i = 0; i < units->size(); ++i) {
    if (i) joined += '\n';
    joined += (*units)[i];
  }
  return joined;
}

LabelVocab::LabelVocab(std::vector<std::string> names, TaskKind kind) : kind_(kind) {
  for (auto& name : names) {
    if (find(name)) throw ValidationError("duplicate label name '" + name + "'");
    add(name);
  }
}

std::optional<std::size_t> LabelVocab::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelVocab::index_of(std::string_view label) const {
  if (auto idx = find(label)) return *idx;
  throw LookupError("label '" + std::string(label) + "' is not in the vocabulary");
}

std::size_t LabelVocab::add(const std::string& label) {
  if (auto idx = find(label)) return *idx;
  index_.emplace(label, names_.size());
  names_.push_back(label);
  return names_.size() - 1;
}

void LabelVocab::validate() const {
  if (kind_ == TaskKind::MultiClass && names_.size() < 2)
    throw ValidationError("multi-class vocabulary needs at least 2 labels, found " +
                          std::to_string(names_.size()));
  if (kind_ == TaskKind::MultiLabel && names_.empty())
    throw ValidationError("multi-label vocabulary needs at least 1 label");
}

std::vector<const Document*> Corpus::in_split(Split split) const {
  std::vector<const Document*> out;
  for (const auto& doc : documents)
    if (split_of(doc) == split) out.push_back(&doc);
  return out;
}

const Document& Corpus::find(std::string_view id) const {
  for (const auto& doc : documents)
    if (doc.id == id) return doc;
  throw LookupError("unknown document id '" + std::string(id) + "'");
}

std::vector<int> Corpus::label_bits(const Document& doc) const {
  std::vector<int> bits(vocab.size(), 0);
  for (const auto& label : doc.labels) bits[vocab.index_of(label)] = 1;
  return bits;
}

std::size_t Corpus::gold_class(const Document& doc) const {
  if (doc.labels.size() != 1)
    throw ValidationError("document '" + doc.id + "' does not have exactly one label");
  return vocab.index_of(doc.labels.front());
}

namespace {

void validate_document(const Document& doc, TaskKind kind) {
  if (doc.id.empty()) throw ValidationError("document with empty id");
  if (doc.text.empty() && !doc.has_units())
    throw ValidationError("document '" + doc.id + "' has neither text nor units");
  std::set<std::string> seen;
  for (const auto& label : doc.labels)
    if (!seen.insert(label).second)
      throw ValidationError("document '" + doc.id + "' repeats label '" + label + "'");
  if (kind == TaskKind::MultiClass && doc.labels.size() != 1)
    throw ValidationError("multi-class document '" + doc.id + "' has " +
                          std::to_string(doc.labels.size()) + " labels, expected 1");
}

}  // namespace

void validate_corpus(const Corpus& corpus) {
  corpus.vocab.validate();
  std::set<std::string> ids;
  for (const auto& doc : corpus.documents) {
    validate_document(doc, corpus.vocab.task_kind());
    if (!ids.insert(doc.id).second) throw ValidationError("duplicate document id '" + doc.id + "'");
    for (const auto& label : doc.labels)
      if (!corpus.vocab.find(label))
        throw ValidationError("document '" + doc.id + "' uses unknown label '" + label + "'");
  }
}

Corpus parse_jsonl(std::istream& in, TaskKind kind) {
  Corpus corpus;
  LabelVocab vocab({}, kind);
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw ParseError(where + "record is not an object");

    Document doc;
    try {
      doc.id = record.at("id").get<std::string>();
      if (record.contains("text")) doc.text = record["text"].get<std::string>();
      if (record.contains("units")) doc.units = record["units"].get<std::vector<std::string>>();
      if (record.contains("labels")) doc.labels = record["labels"].get<std::vector<std::string>>();
      if (record.contains("split")) doc.split = parse_split(record["split"].get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(where + "bad field (" + e.what() + ")");
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }

    try {
      validate_document(doc, kind);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (!ids.insert(doc.id).second)
      throw ValidationError(where + "duplicate document id '" + doc.id + "'");
    for (const auto& label : doc.labels) vocab.add(label);
    corpus.documents.push_back(std::move(doc));
  }
  corpus.vocab = std::move(vocab);
  if (!corpus.documents.empty()) corpus.vocab.validate();
  return corpus;
}

Corpus load_jsonl(const std::filesystem::path& path, TaskKind kind) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open corpus file '" + path.string() + "'");
  return parse_jsonl(in, kind);
}

void write_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents) {
    json record;
    record["id"] = doc.id;
    if (!doc.text.empty() || !doc.units) record["text"] = doc.text;
    if (doc.units) record["units"] = *doc.units;
    record["labels"] = doc.labels;
    if (doc.split) record["split"] = to_string(*doc.split);
    out << record.dump() << '\n';
  }
}

void write_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw LookupError("cannot write '" + path.string() + "'");
  write_jsonl(out, corpus);
}

Corpus split_corpus(Corpus corpus, std::array<double, 3> fractions, std::uint64_t seed) {
  for (double f : fractions)
    if (!(f >= 0.0)) throw ValidationError("split fractions must be non-negative");
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("split fractions must sum to 1");

  std::vector<std::size_t> untagged;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    if (!corpus.documents[i].split) untagged.push_back(i);

  Rng rng(sub_seed(seed, "split"));
  shuffle_in_place(untagged, rng);

  const auto n = static_cast<double>(untagged.size());
  const auto n_train = std::min<std::size_t>(untagged.size(), std::llround(fractions[0] * n));
  const auto n_dev =
      std::min<std::size_t>(untagged.size() - n_train, std::llround(fractions[1] * n));
  for (std::size_t r = 0; r < untagged.size(); ++r) {
    const Split s = r < n_train ? Split::Train : (r < n_train + n_dev ? Split::Dev : Split::Test);
    corpus.documents[untagged[r]].split = s;
  }
  return corpus;
}

}  // namespace swipe
