#include "swipe/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "swipe/error.hpp"
#include "swipe/rng.hpp"

namespace swipe {

using nlohmann::json;

void KeyMap::set(const std::string& doc_id, std::size_t label, std::vector<std::size_t> segments) {
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
  entries_[{doc_id, label}] = std::move(segments);
}

const std::vector<std::size_t>* KeyMap::find(const std::string& doc_id, std::size_t label) const {
  auto it = entries_.find({doc_id, label});
  return it == entries_.end() ? nullptr : &it->second;
}

bool KeyMap::is_key(const std::string& doc_id, std::size_t label, std::size_t segment) const {
  const auto* keys = find(doc_id, label);
  return keys && std::binary_search(keys->begin(), keys->end(), segment);
}

// Alphanumeric only so the tokenizer keeps each one whole; the 'l'/'w'
// prefixes keep label vocabularies disjoint from each other and from filler.
std::string synthetic_key_token(std::size_t label, std::size_t index) {
  return "l" + std::to_string(label) + "k" + std::to_string(index);
}

std::string synthetic_filler_token(std::size_t index) { return "w" + std::to_string(index); }

namespace {

void validate_spec(const SyntheticSpec& spec) {
  auto fail = [](const std::string& msg) { throw ConfigError("synthetic spec: " + msg); };
  if (spec.num_labels == 0) fail("labels must be >= 1");
  if (spec.task_kind == TaskKind::MultiClass && spec.num_labels < 2)
    fail("multi-class needs at least 2 labels");
  if (spec.key_vocab_per_label == 0) fail("key vocabulary per label must be >= 1");
  if (spec.filler_vocab == 0) fail("filler vocabulary must be >= 1");
  if (spec.segments_per_doc.min == 0 || spec.segments_per_doc.min > spec.segments_per_doc.max)
    fail("segments per document must be a non-empty range >= 1");
  if (spec.tokens_per_segment.min == 0 || spec.tokens_per_segment.min > spec.tokens_per_segment.max)
    fail("tokens per segment must be a non-empty range >= 1");
  if (spec.key_tokens_per_segment == 0 || spec.key_tokens_per_segment > spec.tokens_per_segment.min)
    fail("key tokens per segment must be in [1, min tokens per segment]");
  if (spec.key_segments_per_label == 0) fail("key segments per label must be >= 1");
  const std::size_t max_positive =
      spec.task_kind == TaskKind::MultiClass ? 1 : spec.num_labels;
  if (max_positive * spec.key_segments_per_label > spec.segments_per_doc.min)
    fail("too few segments per document to hold disjoint key segments for every label");
  if (!(spec.label_probability >= 0.0 && spec.label_probability <= 1.0))
    fail("label probability must be in [0, 1]");
}

std::size_t draw_in(Rng& rng, CountRange range) {
  return range.min + uniform_index(rng, range.max - range.min + 1);
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);
  Rng rng(sub_seed(spec.seed, "synthetic"));

  std::vector<std::string> names;
  for (std::size_t i = 0; i < spec.num_labels; ++i) names.push_back("label" + std::to_string(i));

  SyntheticCorpus out;
  out.corpus.vocab = LabelVocab(names, spec.task_kind);

  const int width = static_cast<int>(std::to_string(spec.num_docs).size());
  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "syn-%0*zu", width, d);

    std::vector<std::size_t> positives;
    if (spec.task_kind == TaskKind::MultiClass) {
      positives.push_back(uniform_index(rng, spec.num_labels));
    } else {
      for (std::size_t l = 0; l < spec.num_labels; ++l)
        if (uniform_unit(rng) < spec.label_probability) positives.push_back(l);
    }

    const std::size_t m = draw_in(rng, spec.segments_per_doc);
    std::vector<std::size_t> slots(m);
    for (std::size_t k = 0; k < m; ++k) slots[k] = k;
    shuffle_in_place(slots, rng);

    // owner[k] = label whose key segment sits at k, or none
    std::vector<std::optional<std::size_t>> owner(m);
    std::size_t next = 0;
    for (std::size_t label : positives) {
      std::vector<std::size_t> keys;
      for (std::size_t r = 0; r < spec.key_segments_per_label; ++r) {
        owner[slots[next]] = label;
        keys.push_back(slots[next++]);
      }
      out.key_map.set(id, label, keys);
    }

    Document doc;
    doc.id = id;
    doc.units.emplace();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t len = draw_in(rng, spec.tokens_per_segment);
      std::vector<std::string> tokens(len);
      for (auto& t : tokens) t = synthetic_filler_token(uniform_index(rng, spec.filler_vocab));
      if (owner[k]) {
        std::vector<std::size_t> pos(len);
        for (std::size_t p = 0; p < len; ++p) pos[p] = p;
        shuffle_in_place(pos, rng);
        for (std::size_t p = 0; p < spec.key_tokens_per_segment; ++p)
          tokens[pos[p]] =
              synthetic_key_token(*owner[k], uniform_index(rng, spec.key_vocab_per_label));
      }
      doc.units->push_back(join(tokens));
    }
    doc.text = doc.content();
    for (std::size_t label : positives) doc.labels.push_back(names[label]);
    out.corpus.documents.push_back(std::move(doc));
  }
  return out;
}

void write_keymap(std::ostream& out, const KeyMap& keys, const LabelVocab& vocab) {
  for (const auto& [key, segments] : keys.entries()) {
    json record;
    record["doc_id"] = key.first;
    record["label"] = vocab.name(key.second);
    record["key_segments"] = segments;
    out << record.dump() << '\n';
  }
}

void write_keymap(const std::filesystem::path& path, const KeyMap& keys, const LabelVocab& vocab) {
  std::ofstream out(path);
  if (!out) throw LookupError("cannot write '" + path.string() + "'");
  write_keymap(out, keys, vocab);
}

KeyMap parse_keymap(std::istream& in, const LabelVocab& vocab) {
  KeyMap keys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      keys.set(record.at("doc_id").get<std::string>(),
               vocab.index_of(record.at("label").get<std::string>()),
               record.at("key_segments").get<std::vector<std::size_t>>());
    } catch (const json::exception& e) {
      throw ParseError("key map line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return keys;
}

KeyMap load_keymap(const std::filesystem::path& path, const LabelVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open key map '" + path.string() + "'");
  return parse_keymap(in, vocab);
}

}  // namespace swipe
