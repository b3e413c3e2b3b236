#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "swipe/corpus.hpp"
#include "swipe/head.hpp"
#include "swipe/metrics.hpp"
#include "swipe/sufficiency.hpp"

namespace swipe {

// {doc_id, labels: [decided names], per_label: [{label, y, bit, key_segment,
//  positive_segments, segment_scores}]}
nlohmann::json prediction_to_json(const Prediction& pred, const LabelVocab& vocab);

nlohmann::json report_to_json(const MetricReport& report, const LabelVocab& vocab);
nlohmann::json report_to_json(const SufficiencyReport& report);
void write_sufficiency_csv(std::ostream& out, const SufficiencyReport& report);

}  // namespace swipe
