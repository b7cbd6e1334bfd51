#include "morphogrid/core.hpp"

#include <algorithm>
#include <set>

#include "morphogrid/error.hpp"

namespace morphogrid {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kSchema: return "schema-mismatch";
    case ErrorCode::kHomology: return "homology-mismatch";
    case ErrorCode::kInsufficientLandmarks: return "insufficient-landmarks";
    case ErrorCode::kDegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::kDegenerateBaseline: return "degenerate-baseline";
    case ErrorCode::kCollinearTemplate: return "collinear-template";
    case ErrorCode::kCoincidentLandmarks: return "coincident-landmarks";
    case ErrorCode::kSingularSystem: return "singular-system";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kOutsideDomain: return "outside-domain";
    case ErrorCode::kNonConvexSource: return "non-convex-source";
    case ErrorCode::kDegenerateQuad: return "degenerate-quad";
    case ErrorCode::kVanishingLine: return "vanishing-line";
    case ErrorCode::kZeroLengthSegment: return "zero-length-segment";
    case ErrorCode::kDegeneratePolygon: return "degenerate-polygon";
    case ErrorCode::kDegenerateViewport: return "degenerate-viewport";
  }
  return "unknown";
}

const char* units_name(Units units) {
  switch (units) {
    case Units::kRaw: return "raw";
    case Units::kTwoPoint: return "two-point";
    case Units::kProcrustes: return "procrustes";
  }
  return "raw";
}

std::vector<std::string> default_labels(std::size_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) labels.push_back("L" + std::to_string(i + 1));
  return labels;
}

LandmarkConfiguration::LandmarkConfiguration(std::string name, std::vector<Landmark> landmarks,
                                             Units units)
    : name_(std::move(name)), landmarks_(std::move(landmarks)), units_(units) {
  if (landmarks_.size() < 3) {
    throw MorphoError(ErrorCode::kInsufficientLandmarks,
                      "configuration '" + name_ + "' has " + std::to_string(landmarks_.size()) +
                          " landmarks; at least 3 are required");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < landmarks_.size(); ++i) {
    const auto& lm = landmarks_[i];
    if (!seen.insert(lm.label).second) {
      throw MorphoError(ErrorCode::kInvalidArgument,
                        "configuration '" + name_ + "': duplicate landmark label '" + lm.label + "'");
    }
    if (!is_finite(lm.position)) {
      throw MorphoError(ErrorCode::kInvalidArgument, "configuration '" + name_ + "': landmark " +
                                                         std::to_string(i + 1) +
                                                         " has a non-finite coordinate");
    }
  }
}

LandmarkConfiguration LandmarkConfiguration::from_points(std::string name,
                                                         std::span<const Point2> points,
                                                         Units units) {
  auto labels = default_labels(points.size());
  std::vector<Landmark> landmarks;
  landmarks.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) landmarks.push_back({labels[i], points[i]});
  return LandmarkConfiguration(std::move(name), std::move(landmarks), units);
}

LandmarkConfiguration LandmarkConfiguration::with_points(std::span<const Point2> points,
                                                         Units units) const {
  if (points.size() != landmarks_.size()) {
    throw MorphoError(ErrorCode::kHomology, "configuration '" + name_ + "': expected " +
                                                std::to_string(landmarks_.size()) +
                                                " points, got " + std::to_string(points.size()));
  }
  std::vector<Landmark> landmarks = landmarks_;
  for (std::size_t i = 0; i < points.size(); ++i) landmarks[i].position = points[i];
  return LandmarkConfiguration(name_, std::move(landmarks), units);
}

std::vector<Point2> LandmarkConfiguration::points() const {
  std::vector<Point2> out;
  out.reserve(landmarks_.size());
  for (const auto& lm : landmarks_) out.push_back(lm.position);
  return out;
}

std::vector<std::string> LandmarkConfiguration::labels() const {
  std::vector<std::string> out;
  out.reserve(landmarks_.size());
  for (const auto& lm : landmarks_) out.push_back(lm.label);
  return out;
}

Sample::Sample(std::vector<LandmarkConfiguration> configurations,
               std::map<std::string, std::string> groups,
               std::map<std::string, std::string> metadata)
    : configurations_(std::move(configurations)),
      groups_(std::move(groups)),
      metadata_(std::move(metadata)) {
  if (configurations_.empty()) return;
  const auto& first = configurations_.front();
  const auto first_labels = first.labels();
  for (std::size_t c = 1; c < configurations_.size(); ++c) {
    const auto& other = configurations_[c];
    if (other.size() != first.size()) {
      throw MorphoError(ErrorCode::kHomology,
                        "configurations '" + first.name() + "' and '" + other.name() +
                            "' differ in landmark count (" + std::to_string(first.size()) +
                            " vs " + std::to_string(other.size()) + ")");
    }
    if (other.labels() != first_labels) {
      throw MorphoError(ErrorCode::kHomology, "configurations '" + first.name() + "' and '" +
                                                  other.name() +
                                                  "' have different landmark label sequences");
    }
  }
}

std::size_t Sample::landmark_count() const {
  return configurations_.empty() ? 0 : configurations_.front().size();
}

std::vector<std::string> Sample::labels() const {
  return configurations_.empty() ? std::vector<std::string>{} : configurations_.front().labels();
}

std::string Sample::group_of(const std::string& name) const {
  auto it = groups_.find(name);
  return it == groups_.end() ? std::string{} : it->second;
}

std::vector<std::string> Sample::group_tags() const {
  std::vector<std::string> tags;
  for (const auto& config : configurations_) {
    auto tag = group_of(config.name());
    if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
  }
  return tags;
}

Sample Sample::select_group(const std::string& tag) const {
  std::vector<LandmarkConfiguration> selected;
  std::map<std::string, std::string> groups;
  for (const auto& config : configurations_) {
    if (group_of(config.name()) == tag) {
      selected.push_back(config);
      if (!tag.empty()) groups[config.name()] = tag;
    }
  }
  return Sample(std::move(selected), std::move(groups), metadata_);
}

Point2 centroid(std::span<const Point2> points) {
  if (points.empty()) {
    throw MorphoError(ErrorCode::kDegenerateConfiguration, "centroid of an empty point set");
  }
  Point2 sum;
  for (const auto& p : points) sum = sum + p;
  return sum / static_cast<double>(points.size());
}

Point2 centroid(const LandmarkConfiguration& config) { return centroid(config.points()); }

double centroid_size(std::span<const Point2> points) {
  const Point2 c = centroid(points);
  double ss = 0.0;
  for (const auto& p : points) ss += dot(p - c, p - c);
  if (!(ss > 0.0)) {
    throw MorphoError(ErrorCode::kDegenerateConfiguration,
                      "centroid size is zero: all landmarks coincide");
  }
  return std::sqrt(ss);
}

double centroid_size(const LandmarkConfiguration& config) { return centroid_size(config.points()); }

double diameter(std::span<const Point2> points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, distance(points[i], points[j]));
  return d;
}

std::vector<SegmentIndex> enumerate_segments(std::size_t k) {
  if (k < 2) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "segment enumeration needs at least 2 landmarks, got " + std::to_string(k));
  }
  std::vector<SegmentIndex> segments;
  segments.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) segments.push_back({i, j});
  return segments;
}

}  // namespace morphogrid
