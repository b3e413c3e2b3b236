#include "swipe/precomputed.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "swipe/error.hpp"

namespace swipe {

using nlohmann::json;

const SegmentMatrix& PrecomputedVectors::at(const std::string& doc_id) const {
  auto it = matrices_.find(doc_id);
  if (it == matrices_.end()) throw LookupError("no precomputed vectors for document '" + doc_id + "'");
  return it->second;
}

void PrecomputedVectors::insert(SegmentMatrix matrix) {
  if (dim_ == 0) dim_ = matrix.h();
  if (matrix.h() != dim_)
    throw FormatError("vectors for '" + matrix.doc_id + "' have dimension " +
                      std::to_string(matrix.h()) + ", expected " + std::to_string(dim_));
  if (matrices_.count(matrix.doc_id))
    throw FormatError("duplicate vectors for document '" + matrix.doc_id + "'");
  matrices_.emplace(matrix.doc_id, std::move(matrix));
}

PrecomputedVectors parse_precomputed(std::istream& in) {
  PrecomputedVectors out;
  std::optional<std::size_t> header_dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "vectors line " + std::to_string(line_no) + ": ";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what());
    }
    if (!header_dim) {
      if (!record.contains("h") || !record["h"].is_number_unsigned() || record["h"].get<std::size_t>() == 0)
        throw FormatError(where + "first record must be the header {\"h\": int}");
      header_dim = record["h"].get<std::size_t>();
      continue;
    }
    SegmentMatrix matrix;
    std::vector<std::vector<double>> rows;
    try {
      matrix.doc_id = record.at("doc_id").get<std::string>();
      rows = record.at("vectors").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw FormatError(where + e.what());
    }
    if (rows.empty()) throw FormatError(where + "document '" + matrix.doc_id + "' has no vectors");
    matrix.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(*header_dim));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != *header_dim)
        throw FormatError(where + "row " + std::to_string(k) + " has dimension " +
                          std::to_string(rows[k].size()) + ", header declares " +
                          std::to_string(*header_dim));
      for (std::size_t j = 0; j < rows[k].size(); ++j)
        matrix.rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[k][j];
    }
    if (!matrix.rows.allFinite()) throw FormatError(where + "non-finite vector entry");
    out.insert(std::move(matrix));
  }
  return out;
}

PrecomputedVectors load_precomputed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open vectors file '" + path.string() + "'");
  return parse_precomputed(in);
}

void write_precomputed(std::ostream& out, const PrecomputedVectors& vectors) {
  out << json{{"h", vectors.dim()}}.dump() << '\n';
  for (const auto& [id, matrix] : vectors.all()) {
    json rows = json::array();
    for (Eigen::Index k = 0; k < matrix.rows.rows(); ++k) {
      json row = json::array();
      for (Eigen::Index j = 0; j < matrix.rows.cols(); ++j) row.push_back(matrix.rows(k, j));
      rows.push_back(std::move(row));
    }
    out << json{{"doc_id", id}, {"vectors", std::move(rows)}}.dump() << '\n';
  }
}

}  // namespace swipe
