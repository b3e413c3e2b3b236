#include "swipe/segment_matrix.hpp"

#include "swipe/error.hpp"

namespace swipe {

void SegmentMatrix::validate() const {
  if (rows.rows() < 1) throw ValidationError("segment matrix for '" + doc_id + "' has no rows");
  if (rows.cols() < 1) throw ValidationError("segment matrix for '" + doc_id + "' has h = 0");
  if (!rows.allFinite())
    throw ValidationError("segment matrix for '" + doc_id + "' has non-finite entries");
}

}  // namespace swipe
