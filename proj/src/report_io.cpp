#include "swipe/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace swipe {

using nlohmann::json;

namespace {

// NaN is not representable in JSON.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json prediction_to_json(const Prediction& pred, const LabelVocab& vocab) {
  json labels = json::array();
  for (std::size_t i : decided_labels(pred, vocab.task_kind())) labels.push_back(vocab.name(i));
  json per_label = json::array();
  for (std::size_t i = 0; i < pred.labels(); ++i) {
    const Explanation ex = explain(pred, i);
    json scores = json::array();
    for (std::size_t k = 0; k < pred.segments(); ++k)
      scores.push_back(pred.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    json entry = {{"label", vocab.name(i)},
                  {"y", pred.y(static_cast<Eigen::Index>(i))},
                  {"bit", pred.doc_bits[i]},
                  {"key_segment", ex.key_segment},
                  {"positive_segments", ex.positive_segments},
                  {"segment_scores", std::move(scores)}};
    if (pred.g) {
      json gates = json::array();
      for (std::size_t k = 0; k < pred.segments(); ++k)
        gates.push_back((*pred.g)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      entry["segment_gates"] = std::move(gates);
    }
    per_label.push_back(std::move(entry));
  }
  return {{"doc_id", pred.doc_id}, {"labels", std::move(labels)}, {"per_label", std::move(per_label)}};
}

json report_to_json(const MetricReport& report, const LabelVocab& vocab) {
  json out;
  out["samples"] = report.samples;
  if (report.accuracy) out["accuracy"] = number_or_null(*report.accuracy);
  if (report.micro_f1) out["micro_f1"] = number_or_null(*report.micro_f1);
  if (report.macro_f1) out["macro_f1"] = number_or_null(*report.macro_f1);
  json per_label = json::array();
  for (std::size_t i = 0; i < report.per_label.size(); ++i) {
    const auto& s = report.per_label[i];
    per_label.push_back({{"label", i < vocab.size() ? vocab.name(i) : std::to_string(i)},
                         {"tp", s.tp},
                         {"fp", s.fp},
                         {"fn", s.fn},
                         {"support", s.support},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1}});
  }
  out["per_label"] = std::move(per_label);
  return out;
}

json report_to_json(const SufficiencyReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"setting", r.setting},
                    {"swipe", number_or_null(r.explanation)},
                    {"random", number_or_null(r.random)},
                    {"full_text", number_or_null(r.full_text)}});
  return {{"rows", std::move(rows)}};
}

void write_sufficiency_csv(std::ostream& out, const SufficiencyReport& report) {
  out << "setting,swipe,random,full_text\n";
  char buf[64];
  for (const auto& r : report.rows) {
    out << r.setting;
    for (double v : {r.explanation, r.random, r.full_text}) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace swipe
