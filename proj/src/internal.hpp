#pragma once

#include <string>

#include "morphogrid/core.hpp"
#include "morphogrid/error.hpp"

namespace morphogrid::detail {

inline void require_homologous(const LandmarkConfiguration& a, const LandmarkConfiguration& b) {
  if (a.size() != b.size()) {
    throw MorphoError(ErrorCode::kHomology, "configurations '" + a.name() + "' and '" + b.name() +
                                                "' differ in landmark count (" +
                                                std::to_string(a.size()) + " vs " +
                                                std::to_string(b.size()) + ")");
  }
}

/// Ratio of smallest to largest singular value of the centered point cloud;
/// zero for collinear points.
double spread_ratio(std::span<const Point2> points);

}  // namespace morphogrid::detail
