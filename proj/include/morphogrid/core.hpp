#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace morphogrid {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product; positive when b is counterclockwise of a.
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Coordinate frame a configuration is expressed in.
enum class Units { kRaw, kTwoPoint, kProcrustes };

const char* units_name(Units units);

struct Landmark {
  std::string label;
  Point2 position;

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

/// Ordered, labelled 2D landmark list for one specimen or one group mean.
///
/// Homology across configurations is carried by position in the list; labels
/// are for display. Construction validates: at least 3 landmarks, unique
/// labels, finite coordinates.
class LandmarkConfiguration {
 public:
  LandmarkConfiguration(std::string name, std::vector<Landmark> landmarks,
                        Units units = Units::kRaw);

  /// Labels default to L1..Lk.
  static LandmarkConfiguration from_points(std::string name, std::span<const Point2> points,
                                           Units units = Units::kRaw);

  /// Same name and labels, new positions.
  LandmarkConfiguration with_points(std::span<const Point2> points, Units units) const;

  const std::string& name() const { return name_; }
  Units units() const { return units_; }
  std::size_t size() const { return landmarks_.size(); }
  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  const Landmark& operator[](std::size_t i) const { return landmarks_[i]; }
  Point2 position(std::size_t i) const { return landmarks_[i].position; }
  std::vector<Point2> points() const;
  std::vector<std::string> labels() const;

  friend bool operator==(const LandmarkConfiguration&, const LandmarkConfiguration&) = default;

 private:
  std::string name_;
  std::vector<Landmark> landmarks_;
  Units units_;
};

std::vector<std::string> default_labels(std::size_t k);

/// A set of homologous configurations plus grouping and free-form metadata.
class Sample {
 public:
  Sample() = default;

  /// Throws kHomology if landmark counts or label sequences differ; the
  /// message names both offending configurations.
  explicit Sample(std::vector<LandmarkConfiguration> configurations,
                  std::map<std::string, std::string> groups = {},
                  std::map<std::string, std::string> metadata = {});

  const std::vector<LandmarkConfiguration>& configurations() const { return configurations_; }
  const std::map<std::string, std::string>& groups() const { return groups_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  std::size_t size() const { return configurations_.size(); }
  bool empty() const { return configurations_.empty(); }
  std::size_t landmark_count() const;
  std::vector<std::string> labels() const;

  /// Group tag for a configuration name; empty when ungrouped.
  std::string group_of(const std::string& name) const;
  /// Group tags in order of first appearance.
  std::vector<std::string> group_tags() const;
  /// Sub-sample of configurations carrying the given tag, in original order.
  Sample select_group(const std::string& tag) const;

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  std::vector<LandmarkConfiguration> configurations_;
  std::map<std::string, std::string> groups_;
  std::map<std::string, std::string> metadata_;
};

struct SegmentIndex {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const SegmentIndex&, const SegmentIndex&) = default;
  friend auto operator<=>(const SegmentIndex&, const SegmentIndex&) = default;
};

Point2 centroid(std::span<const Point2> points);
Point2 centroid(const LandmarkConfiguration& config);

/// Root of summed squared distances from the centroid. Throws
/// kDegenerateConfiguration when every point coincides.
double centroid_size(std::span<const Point2> points);
double centroid_size(const LandmarkConfiguration& config);

/// Largest pairwise distance.
double diameter(std::span<const Point2> points);

/// All unordered pairs (i<j) in lexicographic order; k(k-1)/2 entries.
std::vector<SegmentIndex> enumerate_segments(std::size_t k);

}  // namespace morphogrid
