#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swipe/synthetic.hpp"

namespace swipe {

struct LabelStats {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;  // gold positives
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  std::optional<double> accuracy;
  std::optional<double> micro_f1;
  std::optional<double> macro_f1;
  std::vector<LabelStats> per_label;
  std::size_t samples = 0;
};

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

// Rows are samples, columns labels. A label with no gold and no predicted
// positives scores F1 = 1 in the macro average; micro F1 is 1 when the
// pooled counts are all zero.
MetricReport f1_scores(const std::vector<std::vector<int>>& predicted,
                       const std::vector<std::vector<int>>& gold);

// seg_bits of one document, [label][segment].
struct SegmentLabels {
  std::string doc_id;
  std::vector<std::vector<int>> bits;
};

// F1 over (segment, label) decisions against gold key membership. Throws
// ValidationError when a gold key index is outside the document's segments.
MetricReport segment_labeling_eval(std::span<const SegmentLabels> predicted, const KeyMap& gold,
                                   std::size_t labels);

struct KeyPick {
  std::string doc_id;
  std::size_t label = 0;
  std::size_t segment = 0;
};

// Fraction of gold (doc, label) pairs, over the documents that appear in
// `picks`, whose picked segment is a gold key segment. NaN with no pairs.
double key_segment_recovery(std::span<const KeyPick> picks, const KeyMap& gold);

}  // namespace swipe
