#pragma once

#include <Eigen/Core>
#include <array>
#include <string_view>
#include <utility>

#include "morphogrid/core.hpp"

namespace morphogrid {

/// Four corners in cyclic order A, B, C, D. Construction rejects coincident
/// corners and self-intersecting (bow-tie) orderings.
class Quad {
 public:
  explicit Quad(std::array<Point2, 4> corners);

  const std::array<Point2, 4>& corners() const { return corners_; }
  Point2 operator[](std::size_t i) const { return corners_[i]; }
  bool is_convex() const;

 private:
  std::array<Point2, 4> corners_;
};

/// Isoparametric coordinates of a point in a quad:
/// p = (1-u)(1-v) A + u(1-v) B + u v C + (1-u) v D.
struct IsoparametricCoords {
  double u = 0.0;
  double v = 0.0;
  bool ambiguous = false;  // both roots fell in the unit box; smaller u taken
};

Point2 bilinear_point(const Quad& quad, double u, double v);

/// Inverts the bilinear form over a convex quad. Throws kNonConvexSource or
/// kOutsideDomain.
IsoparametricCoords bilinear_coordinates(const Quad& src, Point2 p);

/// Bilinear (isoparametric) quad-to-quad map.
Point2 bilinear_eval(const Quad& src, const Quad& dst, Point2 p);

/// Projective map, normalized so that the (2,2) entry is 1.
struct Homography {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
};

/// Unique projective map sending src corners to dst corners. Throws
/// kDegenerateQuad if three corners of either quad are collinear and
/// kSingularSystem if the 8x8 system cannot be solved.
Homography homography_from_quads(const Quad& src, const Quad& dst);

/// Throws kVanishingLine when |w| <= 1e-12.
Point2 homography_eval(const Homography& h, Point2 p);

enum class PrototypeKind { kParallelogram, kRotatedParallelogram, kTrapezoid, kKite };

const char* prototype_name(PrototypeKind kind);
/// Throws kInvalidArgument for unknown names.
PrototypeKind parse_prototype_kind(std::string_view name);

/// Shear, taper and bend magnitude used by prototype_pair.
inline constexpr double kPrototypeParameter = 0.25;

/// Canonical square (axis-aligned for the parallelogram and trapezoid kinds,
/// rotated 45 degrees otherwise) and its transformed partner.
std::pair<LandmarkConfiguration, LandmarkConfiguration> prototype_pair(PrototypeKind kind);

}  // namespace morphogrid
