#include "swipe/truncator.hpp"

#include <algorithm>
#include <cctype>
#include <span>

#include "swipe/error.hpp"

namespace swipe {

std::vector<Token> tokenize_with_offsets(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  auto is_punct = [](unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; };
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (is_punct(c)) {
      tokens.push_back({std::string(1, static_cast<char>(c)), i, i + 1});
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::string word;
    while (i < n) {
      const auto ch = static_cast<unsigned char>(text[i]);
      if (is_space(ch) || is_punct(ch)) break;
      word += static_cast<char>(ch < 0x80 ? std::tolower(ch) : ch);
      ++i;
    }
    tokens.push_back({std::move(word), start, i});
  }
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_with_offsets(text)) out.push_back(std::move(t.text));
  return out;
}

std::string_view to_string(TruncationStrategy strategy) {
  switch (strategy) {
    case TruncationStrategy::Auto: return "auto";
    case TruncationStrategy::Punct: return "punct";
    case TruncationStrategy::Structure: return "structure";
  }
  return "auto";
}

TruncationStrategy parse_truncation_strategy(std::string_view text) {
  if (text == "auto") return TruncationStrategy::Auto;
  if (text == "punct") return TruncationStrategy::Punct;
  if (text == "structure") return TruncationStrategy::Structure;
  throw ConfigError("unknown truncation strategy '" + std::string(text) + "'");
}

void TruncationConfig::validate() const {
  if (window_len == 0) throw ConfigError("window length must be >= 1");
  if (overlap >= window_len) throw ConfigError("overlap must be smaller than the window length");
  if (max_seg_len == 0) throw ConfigError("max segment length must be >= 1");
}

namespace {

Segment make_segment(const Document& doc, std::size_t index, std::span<const Token> tokens) {
  Segment seg;
  seg.doc_id = doc.id;
  seg.index = index;
  for (const auto& t : tokens) seg.tokens.push_back(t.text);
  seg.span = {tokens.front().begin, tokens.back().end};
  return seg;
}

}  // namespace

std::vector<Segment> truncate_auto(const Document& doc, const TruncationConfig& cfg) {
  if (cfg.window_len <= cfg.overlap)
    throw ConfigError("window length must exceed the overlap");
  const std::string content = doc.content();
  const auto tokens = tokenize_with_offsets(content);
  const std::span<const Token> all(tokens);
  const std::size_t stride = cfg.window_len - cfg.overlap;

  std::vector<Segment> segments;
  for (std::size_t start = 0; start < tokens.size(); start += stride) {
    const std::size_t len = std::min(cfg.window_len, tokens.size() - start);
    segments.push_back(make_segment(doc, segments.size(), all.subspan(start, len)));
  }
  return segments;
}

std::vector<Segment> truncate_punct(const Document& doc, const TruncationConfig& cfg) {
  if (cfg.max_seg_len == 0) throw ConfigError("max segment length must be >= 1");
  const std::string content = doc.content();
  const auto tokens = tokenize_with_offsets(content);
  const std::span<const Token> all(tokens);

  auto is_terminator = [&](const Token& t) {
    return t.text.size() == 1 && cfg.sentence_terminators.count(t.text[0]) != 0;
  };

  // [begin, end) token ranges of sentences, terminator included
  std::vector<std::pair<std::size_t, std::size_t>> sentences;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_terminator(tokens[i])) {
      sentences.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  if (begin < tokens.size()) sentences.emplace_back(begin, tokens.size());

  std::vector<Segment> segments;
  std::size_t cur_begin = 0, cur_end = 0;  // current greedy group
  auto flush = [&] {
    if (cur_end > cur_begin)
      segments.push_back(make_segment(doc, segments.size(), all.subspan(cur_begin, cur_end - cur_begin)));
    cur_begin = cur_end = 0;
  };

  for (auto [s_begin, s_end] : sentences) {
    const std::size_t len = s_end - s_begin;
    if (len > cfg.max_seg_len) {
      flush();
      std::size_t pos = s_begin;
      for (; pos + cfg.max_seg_len <= s_end; pos += cfg.max_seg_len)
        segments.push_back(make_segment(doc, segments.size(), all.subspan(pos, cfg.max_seg_len)));
      // remainder stays open for merging with the next sentence
      if (pos < s_end) cur_begin = pos, cur_end = s_end;
      continue;
    }
    if (cur_end > cur_begin && (cur_end - cur_begin) + len <= cfg.max_seg_len) {
      cur_end = s_end;
    } else {
      flush();
      cur_begin = s_begin;
      cur_end = s_end;
    }
  }
  flush();
  return segments;
}

std::vector<Segment> truncate_struct(const Document& doc, const TruncationConfig&) {
  if (!doc.has_units())
    throw ValidationError("document '" + doc.id +
                          "' has no structural units; use auto or punct truncation");
  std::vector<Segment> segments;
  for (std::size_t u = 0; u < doc.units->size(); ++u) {
    Segment seg;
    seg.doc_id = doc.id;
    seg.index = u;
    seg.tokens = tokenize((*doc.units)[u]);
    if (seg.tokens.empty()) seg.tokens.emplace_back(kEmptyUnitToken);
    seg.span = {u, u + 1};
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::vector<Segment> truncate(const Document& doc, const TruncationConfig& cfg) {
  std::vector<Segment> segments;
  switch (cfg.strategy) {
    case TruncationStrategy::Auto: segments = truncate_auto(doc, cfg); break;
    case TruncationStrategy::Punct: segments = truncate_punct(doc, cfg); break;
    case TruncationStrategy::Structure: segments = truncate_struct(doc, cfg); break;
  }
  if (segments.empty()) throw ValidationError("document '" + doc.id + "' has no tokens");
  return segments;
}

}  // namespace swipe
