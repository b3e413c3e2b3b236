#include "swipe/metrics.hpp"

#include <limits>
#include <set>

#include "swipe/error.hpp"

namespace swipe {

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
  if (predicted.size() != gold.size())
    throw ValidationError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(gold.size()) + " gold labels");
  if (gold.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

namespace {

double f1_of(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

MetricReport f1_scores(const std::vector<std::vector<int>>& predicted,
                       const std::vector<std::vector<int>>& gold) {
  if (predicted.size() != gold.size())
    throw ValidationError("f1: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(gold.size()) + " gold rows");
  MetricReport report;
  report.samples = gold.size();
  const std::size_t L = gold.empty() ? 0 : gold.front().size();
  report.per_label.resize(L);
  for (std::size_t r = 0; r < gold.size(); ++r) {
    if (gold[r].size() != L || predicted[r].size() != L)
      throw ValidationError("f1: row " + std::to_string(r) + " has the wrong label count");
    for (std::size_t i = 0; i < L; ++i) {
      const bool p = predicted[r][i] != 0;
      const bool g = gold[r][i] != 0;
      auto& s = report.per_label[i];
      s.tp += p && g;
      s.fp += p && !g;
      s.fn += !p && g;
      s.support += g;
    }
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  double macro = 0.0;
  for (auto& s : report.per_label) {
    s.precision = s.tp + s.fp == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    s.recall = s.tp + s.fn == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.f1 = f1_of(s.tp, s.fp, s.fn);
    macro += s.f1;
    tp += s.tp;
    fp += s.fp;
    fn += s.fn;
  }
  report.micro_f1 = f1_of(tp, fp, fn);
  report.macro_f1 = L == 0 ? 1.0 : macro / static_cast<double>(L);
  return report;
}

MetricReport segment_labeling_eval(std::span<const SegmentLabels> predicted, const KeyMap& gold,
                                   std::size_t labels) {
  std::vector<std::vector<int>> pred_rows, gold_rows;
  std::set<std::string> docs;
  for (const auto& doc : predicted) {
    if (doc.bits.size() != labels)
      throw ValidationError("segment labels for '" + doc.doc_id + "' cover " +
                            std::to_string(doc.bits.size()) + " labels, expected " + std::to_string(labels));
    docs.insert(doc.doc_id);
    const std::size_t m = labels == 0 ? 0 : doc.bits.front().size();
    for (std::size_t i = 0; i < labels; ++i) {
      if (doc.bits[i].size() != m)
        throw ValidationError("segment labels for '" + doc.doc_id + "' are ragged");
      if (const auto* keys = gold.find(doc.doc_id, i))
        for (std::size_t k : *keys)
          if (k >= m)
            throw ValidationError("gold key segment " + std::to_string(k) + " of '" + doc.doc_id +
                                  "' is outside its " + std::to_string(m) + " predicted segments");
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<int> p(labels), g(labels);
      for (std::size_t i = 0; i < labels; ++i) {
        p[i] = doc.bits[i][k];
        g[i] = gold.is_key(doc.doc_id, i, k) ? 1 : 0;
      }
      pred_rows.push_back(std::move(p));
      gold_rows.push_back(std::move(g));
    }
  }
  auto report = f1_scores(pred_rows, gold_rows);
  if (labels > 0 && report.per_label.empty()) report.per_label.resize(labels);
  return report;
}

double key_segment_recovery(std::span<const KeyPick> picks, const KeyMap& gold) {
  std::set<std::string> docs;
  std::map<KeyMap::Key, std::size_t> picked;
  for (const auto& p : picks) {
    docs.insert(p.doc_id);
    picked[{p.doc_id, p.label}] = p.segment;
  }
  std::size_t total = 0, hits = 0;
  for (const auto& [key, segments] : gold.entries()) {
    if (!docs.count(key.first)) continue;
    ++total;
    auto it = picked.find(key);
    if (it != picked.end() && gold.is_key(key.first, key.second, it->second)) ++hits;
  }
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace swipe
