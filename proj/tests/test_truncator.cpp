#include <doctest.h>

#include <algorithm>

#include "swipe/error.hpp"
#include "swipe/rng.hpp"
#include "swipe/truncator.hpp"

using namespace swipe;

namespace {

Document doc_of(std::string text) { return {"d", std::move(text), std::nullopt, {"a"}, std::nullopt}; }

std::vector<std::size_t> sizes(const std::vector<Segment>& segs) {
  std::vector<std::size_t> out;
  for (const auto& s : segs) out.push_back(s.tokens.size());
  return out;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "w" + std::to_string(i) + " ";
  return s;
}

std::vector<std::string> flatten(const std::vector<Segment>& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("The cat sat.") == std::vector<std::string>{"the", "cat", "sat", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("A  b\tc") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("don't!") == std::vector<std::string>{"don", "'", "t", "!"});

  const auto toks = tokenize_with_offsets("  Hi, you");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].begin == 2);
  CHECK(toks[0].end == 4);
  CHECK(toks[1].text == ",");
  CHECK(toks[2].begin == 6);
}

TEST_CASE("automatic truncation windows") {
  TruncationConfig cfg;
  cfg.window_len = 4;
  cfg.overlap = 0;
  CHECK(sizes(truncate_auto(doc_of(words(10)), cfg)) == std::vector<std::size_t>{4, 4, 2});

  // stride 2 enumerates starts 0, 2, 4, 6, 8
  cfg.overlap = 2;
  const auto overlapped = truncate_auto(doc_of(words(10)), cfg);
  REQUIRE(overlapped.size() == 5);
  for (std::size_t k = 0; k < overlapped.size(); ++k) {
    CHECK(overlapped[k].index == k);
    CHECK(overlapped[k].tokens.front() == "w" + std::to_string(2 * k));
  }
  CHECK(sizes(overlapped) == std::vector<std::size_t>{4, 4, 4, 4, 2});

  cfg.overlap = 0;
  CHECK(sizes(truncate_auto(doc_of(words(3)), cfg)) == std::vector<std::size_t>{3});

  cfg.overlap = 4;
  CHECK_THROWS_AS(truncate_auto(doc_of(words(3)), cfg), ConfigError);
}

TEST_CASE("automatic truncation spans point into the source text") {
  TruncationConfig cfg;
  cfg.window_len = 2;
  const auto d = doc_of("Alpha beta gamma");
  const auto segs = truncate_auto(d, cfg);
  REQUIRE(segs.size() == 2);
  CHECK(d.text.substr(segs[0].span.begin, segs[0].span.end - segs[0].span.begin) == "Alpha beta");
  CHECK(d.text.substr(segs[1].span.begin, segs[1].span.end - segs[1].span.begin) == "gamma");
}

TEST_CASE("automatic truncation coverage property") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 60);
    TruncationConfig cfg;
    cfg.window_len = 1 + uniform_index(rng, 12);
    cfg.overlap = uniform_index(rng, cfg.window_len);
    const auto d = doc_of(words(n));
    const auto all = tokenize(d.text);
    const auto segs = truncate_auto(d, cfg);
    const auto flat = flatten(segs);
    for (const auto& t : all) CHECK(std::find(flat.begin(), flat.end(), t) != flat.end());
    if (cfg.overlap == 0) CHECK(flat == all);
    const std::size_t stride = cfg.window_len - cfg.overlap;
    CHECK(segs.size() == (n + stride - 1) / stride);
    for (std::size_t k = 0; k < segs.size(); ++k)
      CHECK(segs[k].tokens.size() == std::min(cfg.window_len, n - k * stride));
  }
}

TEST_CASE("punctuation truncation") {
  TruncationConfig cfg;
  cfg.strategy = TruncationStrategy::Punct;
  cfg.max_seg_len = 4;
  const auto segs = truncate_punct(doc_of("A b. C d. E f."), cfg);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].tokens == std::vector<std::string>{"a", "b", "."});
  CHECK(segs[1].tokens == std::vector<std::string>{"c", "d", "."});
  CHECK(segs[2].tokens == std::vector<std::string>{"e", "f", "."});

  CHECK(sizes(truncate_punct(doc_of(words(10)), cfg)) == std::vector<std::size_t>{4, 4, 2});

  cfg.max_seg_len = 64;
  CHECK(sizes(truncate_punct(doc_of("no terminators here at all"), cfg)) == std::vector<std::size_t>{5});

  // greedy merge: "a." + "b." fit in 4, "c d e." does not join them
  cfg.max_seg_len = 4;
  CHECK(sizes(truncate_punct(doc_of("a. b. c d e."), cfg)) == std::vector<std::size_t>{4, 4});
  cfg.sentence_terminators = {'!'};
  CHECK(sizes(truncate_punct(doc_of("x y! z w."), cfg)) == std::vector<std::size_t>{3, 3});
}

TEST_CASE("punctuation truncation preserves token order") {
  Rng rng(7);
  const char* pieces[] = {"alpha", "beta", ".", "gamma", "!", "delta", "?", "eps"};
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    const std::size_t n = 1 + uniform_index(rng, 40);
    for (std::size_t i = 0; i < n; ++i) text += std::string(pieces[uniform_index(rng, 8)]) + " ";
    TruncationConfig cfg;
    cfg.max_seg_len = 1 + uniform_index(rng, 6);
    const auto d = doc_of(text);
    const auto segs = truncate_punct(d, cfg);
    CHECK(flatten(segs) == tokenize(text));
    for (const auto& s : segs) CHECK(s.tokens.size() <= cfg.max_seg_len);
  }
}

TEST_CASE("structure truncation") {
  Document d{"dlg", "", std::vector<std::string>{"hi", "how are you", "fine", "bye", "ok"}, {"a"}, std::nullopt};
  TruncationConfig cfg;
  const auto segs = truncate_struct(d, cfg);
  REQUIRE(segs.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(segs[k].index == k);
    CHECK(segs[k].span == Span{k, k + 1});
  }
  CHECK(flatten(segs) == tokenize(d.content()));

  Document with_blank{"d", "", std::vector<std::string>{"one", "   ", "three"}, {"a"}, std::nullopt};
  const auto blank = truncate_struct(with_blank, cfg);
  REQUIRE(blank.size() == 3);
  CHECK(blank[1].tokens == std::vector<std::string>{std::string(kEmptyUnitToken)});
  CHECK(blank[2].index == 2);

  CHECK_THROWS_AS(truncate_struct(doc_of("plain text"), cfg), ValidationError);
}

TEST_CASE("truncate dispatch and determinism") {
  TruncationConfig cfg;
  cfg.window_len = 3;
  const auto d = doc_of("One two. Three four five six. Seven!");
  for (auto strategy : {TruncationStrategy::Auto, TruncationStrategy::Punct}) {
    cfg.strategy = strategy;
    const auto a = truncate(d, cfg);
    const auto b = truncate(d, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].tokens == b[k].tokens);
      CHECK(a[k].span == b[k].span);
    }
  }
  cfg.strategy = TruncationStrategy::Auto;
  CHECK_THROWS_AS(truncate(doc_of("   "), cfg), ValidationError);
  CHECK(parse_truncation_strategy("structure") == TruncationStrategy::Structure);
  CHECK_THROWS_AS(parse_truncation_strategy("words"), ConfigError);
}
