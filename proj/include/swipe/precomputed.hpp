#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "swipe/segment_matrix.hpp"

namespace swipe {

// Externally produced segment vectors, e.g. pooled [CLS] outputs of a
// pretrained encoder. Constants: they never receive gradients.
class PrecomputedVectors {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return matrices_.size(); }
  bool contains(const std::string& doc_id) const { return matrices_.count(doc_id) != 0; }
  const SegmentMatrix& at(const std::string& doc_id) const;  // throws LookupError

  void insert(SegmentMatrix matrix);  // throws FormatError on dimension mismatch
  const std::map<std::string, SegmentMatrix>& all() const { return matrices_; }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, SegmentMatrix> matrices_;
};

// Sidecar JSONL: a header record {"h": int} followed by one record per
// document {"doc_id": str, "vectors": [[h floats], ...]}, rows in segment
// order. An empty file yields an empty set.
PrecomputedVectors parse_precomputed(std::istream& in);
PrecomputedVectors load_precomputed(const std::filesystem::path& path);
void write_precomputed(std::ostream& out, const PrecomputedVectors& vectors);

}  // namespace swipe
