#include "morphogrid/gridlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "internal.hpp"

namespace morphogrid {

namespace {

constexpr double kLatticeSnap = 1e-9;  // fraction of a cell
constexpr double kBoundaryTolerance = 1e-12;

std::vector<double> lattice_lines(Interval range, double anchor, double cell) {
  const double eps = kLatticeSnap;
  const auto first = static_cast<long long>(std::ceil((range.lo - anchor) / cell - eps));
  const auto last = static_cast<long long>(std::floor((range.hi - anchor) / cell + eps));
  std::vector<double> lines;
  lines.push_back(range.lo);
  for (long long n = first; n <= last; ++n) {
    const double pos = anchor + static_cast<double>(n) * cell;
    if (pos - range.lo <= eps * cell || range.hi - pos <= eps * cell) continue;
    lines.push_back(pos);
  }
  lines.push_back(range.hi);
  return lines;
}

std::vector<double> sample_positions(const std::vector<double>& lines, int samples_per_edge) {
  std::vector<double> out;
  const int steps = samples_per_edge - 1;
  for (std::size_t s = 0; s + 1 < lines.size(); ++s) {
    const double a = lines[s];
    const double b = lines[s + 1];
    for (int t = 0; t < steps; ++t) out.push_back(a + (b - a) * static_cast<double>(t) / steps);
  }
  out.push_back(lines.back());
  return out;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

void validate_polygon(std::span<const Point2> polygon) {
  if (polygon.size() < 3) {
    throw MorphoError(ErrorCode::kDegeneratePolygon,
                      "polygon needs at least 3 vertices, got " + std::to_string(polygon.size()));
  }
  const double d = diameter(polygon);
  if (!(std::abs(polygon_area(polygon)) > 1e-14 * d * d)) {
    throw MorphoError(ErrorCode::kDegeneratePolygon, "polygon has zero area");
  }
}

}  // namespace

int GridSpec::cells_x() const { return static_cast<int>(lines_x().size()) - 1; }
int GridSpec::cells_y() const { return static_cast<int>(lines_y().size()) - 1; }

std::vector<double> GridSpec::lines_x() const { return lattice_lines(x_range, anchor.x, cell_size); }
std::vector<double> GridSpec::lines_y() const { return lattice_lines(y_range, anchor.y, cell_size); }

GridSpec make_grid(const LandmarkConfiguration& template_config, double margin, int cells) {
  if (!(margin >= 0.0)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "grid margin must be non-negative");
  }
  if (cells < 1) {
    throw MorphoError(ErrorCode::kInvalidArgument, "grid needs at least one cell per axis");
  }
  const auto points = template_config.points();
  auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                          [](Point2 a, Point2 b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                          [](Point2 a, Point2 b) { return a.y < b.y; });
  const double w = xmax->x - xmin->x;
  const double h = ymax->y - ymin->y;
  if (!(w > 0.0) || !(h > 0.0)) {
    throw MorphoError(ErrorCode::kDegenerateConfiguration,
                      "template bounding box has zero area; cannot build a grid");
  }
  Interval xr{xmin->x - margin * w, xmax->x + margin * w};
  Interval yr{ymin->y - margin * h, ymax->y + margin * h};
  const double cell = std::max(xr.extent(), yr.extent()) / cells;

  auto square_up = [cell](Interval r) {
    const double n = std::ceil(r.extent() / cell - kLatticeSnap);
    const double pad = 0.5 * (n * cell - r.extent());
    return pad > 0.0 ? Interval{r.lo - pad, r.hi + pad} : r;
  };
  xr = square_up(xr);
  yr = square_up(yr);

  GridSpec spec;
  spec.x_range = xr;
  spec.y_range = yr;
  spec.cell_size = cell;
  spec.anchor = {xr.lo, yr.lo};
  spec.base_width = xr.extent();
  spec.base_height = yr.extent();
  return spec;
}

Direction parse_direction(std::string_view name) {
  if (name == "left") return Direction::kLeft;
  if (name == "right") return Direction::kRight;
  if (name == "up") return Direction::kUp;
  if (name == "down") return Direction::kDown;
  throw MorphoError(ErrorCode::kInvalidArgument,
                    "unknown direction '" + std::string(name) + "' (left|right|up|down)");
}

GridSpec extend_grid(const GridSpec& spec, Direction direction, double multiples) {
  if (!(multiples > 0.0)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "grid extension must be positive");
  }
  GridSpec out = spec;
  switch (direction) {
    case Direction::kLeft: out.x_range.lo -= multiples * spec.base_width; break;
    case Direction::kRight: out.x_range.hi += multiples * spec.base_width; break;
    case Direction::kDown: out.y_range.lo -= multiples * spec.base_height; break;
    case Direction::kUp: out.y_range.hi += multiples * spec.base_height; break;
  }
  return out;
}

std::optional<Point2> PointMap::operator()(Point2 p) const {
  struct Visitor {
    Point2 p;
    std::optional<Point2> operator()(const IdentityMap&) const { return p; }
    std::optional<Point2> operator()(const TpsModel& m) const { return tps_eval(m, p); }
    std::optional<Point2> operator()(const PolynomialTrend& t) const { return trend_eval(t, p); }
    std::optional<Point2> operator()(const AffineMap2& a) const { return a.apply(p); }
    std::optional<Point2> operator()(const BilinearPair& b) const {
      try {
        return bilinear_eval(b.src, b.dst, p);
      } catch (const MorphoError&) {
        return std::nullopt;
      }
    }
    std::optional<Point2> operator()(const Homography& h) const {
      try {
        return homography_eval(h, p);
      } catch (const MorphoError&) {
        return std::nullopt;
      }
    }
  };
  auto image = std::visit(Visitor{p}, map_);
  if (image && !is_finite(*image)) return std::nullopt;
  return image;
}

DeformedGrid deform_grid(const GridSpec& spec, const PointMap& map) {
  if (spec.samples_per_edge < 2) {
    throw MorphoError(ErrorCode::kInvalidArgument, "grid needs at least 2 samples per cell edge");
  }
  if (!(spec.x_range.extent() > 0.0) || !(spec.y_range.extent() > 0.0) || !(spec.cell_size > 0.0)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "grid ranges must be non-empty");
  }
  const auto xs = spec.lines_x();
  const auto ys = spec.lines_y();
  const auto xs_fine = sample_positions(xs, spec.samples_per_edge);
  const auto ys_fine = sample_positions(ys, spec.samples_per_edge);

  auto push = [&map](Point2 pre) {
    const auto image = map(pre);
    return image ? GridSample{pre, *image, true} : GridSample{pre, pre, false};
  };

  DeformedGrid grid;
  grid.vertical.reserve(xs.size());
  for (double x : xs) {
    GridPolyline line;
    line.reserve(ys_fine.size());
    for (double y : ys_fine) line.push_back(push({x, y}));
    grid.vertical.push_back(std::move(line));
  }
  grid.horizontal.reserve(ys.size());
  for (double y : ys) {
    GridPolyline line;
    line.reserve(xs_fine.size());
    for (double x : xs_fine) line.push_back(push({x, y}));
    grid.horizontal.push_back(std::move(line));
  }
  return grid;
}

std::vector<std::vector<Point2>> visible_runs(const GridPolyline& polyline) {
  std::vector<std::vector<Point2>> runs;
  std::vector<Point2> current;
  for (const auto& s : polyline) {
    if (s.kept) {
      current.push_back(s.image);
    } else {
      if (current.size() >= 2) runs.push_back(std::move(current));
      current.clear();
    }
  }
  if (current.size() >= 2) runs.push_back(std::move(current));
  return runs;
}

double polygon_area(std::span<const Point2> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * twice;
}

bool point_in_polygon(Point2 p, std::span<const Point2> polygon) {
  validate_polygon(polygon);
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, polygon[i], polygon[(i + 1) % n]) <= kBoundaryTolerance) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

DeformedGrid trim_grid(const DeformedGrid& grid, std::span<const Point2> polygon, TrimMode mode) {
  validate_polygon(polygon);
  DeformedGrid out = grid;
  auto trim = [&](std::vector<GridPolyline>& family) {
    for (auto& line : family) {
      for (auto& s : line) {
        if (!s.kept) continue;
        const Point2 probe = mode == TrimMode::kTemplate ? s.preimage : s.image;
        if (!point_in_polygon(probe, polygon)) s.kept = false;
      }
    }
  };
  trim(out.vertical);
  trim(out.horizontal);
  return out;
}

SegmentRotationReport segment_rotations(const LandmarkConfiguration& template_config,
                                        const LandmarkConfiguration& target) {
  detail::require_homologous(template_config, target);
  if (template_config.units() != target.units()) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      std::string("segment rotations need a common frame; got ") +
                          units_name(template_config.units()) + " and " + units_name(target.units()));
  }
  SegmentRotationReport report;
  for (const auto& seg : enumerate_segments(template_config.size())) {
    const Point2 a = template_config.position(seg.j) - template_config.position(seg.i);
    const Point2 b = target.position(seg.j) - target.position(seg.i);
    const double la = norm(a);
    const double lb = norm(b);
    if (!(la > 0.0) || !(lb > 0.0)) {
      throw MorphoError(ErrorCode::kZeroLengthSegment,
                        "segment " + template_config[seg.i].label + "-" +
                            template_config[seg.j].label + " has zero length");
    }
    double angle = std::atan2(cross(a, b), dot(a, b));
    if (angle <= -std::numbers::pi) angle = std::numbers::pi;
    report.segments.push_back({seg, angle, lb / la, std::atan2(a.y, a.x)});
  }
  return report;
}

std::vector<SegmentRotation> filter_rotations(const SegmentRotationReport& report,
                                              double threshold) {
  if (!(threshold >= 0.0)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "rotation threshold must be non-negative");
  }
  std::vector<SegmentRotation> out;
  for (const auto& s : report.segments)
    if (std::abs(s.rotation) >= threshold) out.push_back(s);
  std::stable_sort(out.begin(), out.end(), [](const SegmentRotation& a, const SegmentRotation& b) {
    return std::abs(a.rotation) > std::abs(b.rotation);
  });
  return out;
}

}  // namespace morphogrid
