#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "morphogrid/core.hpp"
#include "morphogrid/maps.hpp"
#include "morphogrid/registration.hpp"
#include "morphogrid/tps.hpp"
#include "morphogrid/trend.hpp"

namespace morphogrid {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double extent() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Square lattice over a rectangle of template coordinates.
///
/// Lattice lines sit at anchor + n * cell_size; range edges are always drawn
/// even when an extension leaves a partial cell. `base_*` records the extent
/// before any extension so repeated extensions add up.
struct GridSpec {
  Interval x_range;
  Interval y_range;
  double cell_size = 1.0;
  Point2 anchor;
  int samples_per_edge = 10;  // points per cell edge, endpoints included
  double base_width = 1.0;
  double base_height = 1.0;

  int cells_x() const;
  int cells_y() const;
  /// Lattice line positions along each axis, range edges included.
  std::vector<double> lines_x() const;
  std::vector<double> lines_y() const;
};

inline constexpr int kDefaultGridCells = 24;

/// Bounding box of the template, padded by `margin` times its width/height on
/// every side, then squared up: cell size = larger extent / cells, and the
/// shorter axis is widened symmetrically to a whole number of cells.
GridSpec make_grid(const LandmarkConfiguration& template_config, double margin,
                   int cells = kDefaultGridCells);

enum class Direction { kLeft, kRight, kUp, kDown };

Direction parse_direction(std::string_view name);

/// Extends one side by `multiples` times the pre-extension extent.
GridSpec extend_grid(const GridSpec& spec, Direction direction, double multiples);

struct BilinearPair {
  Quad src;
  Quad dst;
};

struct IdentityMap {};

/// Uniform evaluation over the supported map families. Evaluation returns
/// nullopt where the map is undefined (outside a bilinear source, on a
/// homography's vanishing line).
class PointMap {
 public:
  using Variant =
      std::variant<IdentityMap, TpsModel, PolynomialTrend, AffineMap2, BilinearPair, Homography>;

  PointMap() = default;
  template <typename Map>
    requires(std::is_constructible_v<Variant, Map &&> && !std::is_same_v<std::remove_cvref_t<Map>, PointMap>)
  PointMap(Map&& map) : map_(std::forward<Map>(map)) {}  // NOLINT(google-explicit-constructor)

  std::optional<Point2> operator()(Point2 p) const;
  const Variant& variant() const { return map_; }

 private:
  Variant map_;
};

struct GridSample {
  Point2 preimage;
  Point2 image;
  bool kept = true;
};

using GridPolyline = std::vector<GridSample>;

struct DeformedGrid {
  std::vector<GridPolyline> vertical;    // initially x = const
  std::vector<GridPolyline> horizontal;  // initially y = const
};

DeformedGrid deform_grid(const GridSpec& spec, const PointMap& map);

/// Maximal runs of consecutive kept samples, as image-space polylines with
/// at least two points.
std::vector<std::vector<Point2>> visible_runs(const GridPolyline& polyline);

/// Even-odd rule; points within 1e-12 of an edge count as inside. Throws
/// kDegeneratePolygon for fewer than 3 vertices or zero area.
bool point_in_polygon(Point2 p, std::span<const Point2> polygon);

/// Signed shoelace area, positive for counterclockwise vertex order.
double polygon_area(std::span<const Point2> polygon);

/// Convex hull, counterclockwise, starting from the lowest-leftmost point.
std::vector<Point2> convex_hull(std::span<const Point2> points);

/// Which sample coordinate the trimming polygon is tested against.
enum class TrimMode { kTemplate, kTarget };

/// Clears `kept` on samples outside the polygon. Image coordinates are never
/// altered.
DeformedGrid trim_grid(const DeformedGrid& grid, std::span<const Point2> polygon,
                       TrimMode mode = TrimMode::kTemplate);

struct SegmentRotation {
  SegmentIndex segment;
  double rotation = 0.0;  // radians in (-pi, pi], counterclockwise positive
  double length_ratio = 1.0;
  double template_direction = 0.0;
};

struct SegmentRotationReport {
  std::vector<SegmentRotation> segments;
  std::string sign_convention = "counterclockwise-positive";
};

/// Both configurations must already share a frame (matching unit tags).
/// Throws kZeroLengthSegment naming the pair.
SegmentRotationReport segment_rotations(const LandmarkConfiguration& template_config,
                                        const LandmarkConfiguration& target);

/// Segments with |rotation| >= threshold, largest magnitude first.
std::vector<SegmentRotation> filter_rotations(const SegmentRotationReport& report,
                                              double threshold);

}  // namespace morphogrid
