#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "swipe/corpus.hpp"

namespace swipe {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;
};

// Lowercased whitespace-delimited tokens; every ASCII punctuation character
// becomes a standalone token.
std::vector<Token> tokenize_with_offsets(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

// Stand-in for a structural unit with no tokens, so segment indices stay
// aligned with per-unit annotations.
inline constexpr std::string_view kEmptyUnitToken = "<empty>";

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct Segment {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<std::string> tokens;
  // Byte offsets into Document::content(), or [unit, unit + 1) for
  // structure-based truncation.
  Span span;
};

enum class TruncationStrategy { Auto, Punct, Structure };

std::string_view to_string(TruncationStrategy strategy);
TruncationStrategy parse_truncation_strategy(std::string_view text);

struct TruncationConfig {
  TruncationStrategy strategy = TruncationStrategy::Auto;
  std::size_t window_len = 64;
  std::size_t overlap = 0;
  std::size_t max_seg_len = 64;
  std::set<char> sentence_terminators{'.', '!', '?'};

  void validate() const;
};

// One window starting at every multiple of (window_len - overlap) below the
// token count; windows running past the end are cut short.
std::vector<Segment> truncate_auto(const Document& doc, const TruncationConfig& cfg);
std::vector<Segment> truncate_punct(const Document& doc, const TruncationConfig& cfg);
std::vector<Segment> truncate_struct(const Document& doc, const TruncationConfig& cfg);

// Dispatches on cfg.strategy. Throws ValidationError when the document
// yields no segments.
std::vector<Segment> truncate(const Document& doc, const TruncationConfig& cfg);

}  // namespace swipe
