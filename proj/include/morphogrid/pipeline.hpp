#pragma once

#include <string>
#include <utility>
#include <vector>

#include "morphogrid/gridlab.hpp"
#include "morphogrid/render.hpp"
#include "morphogrid/trend.hpp"

namespace morphogrid {

/// Template and target configurations for a two-group comparison.
struct GroupPair {
  LandmarkConfiguration template_config;
  LandmarkConfiguration target;
  std::string template_group;
  std::string target_group;
};

/// GPA mean of each of two groups. With no tags, the first two groups in
/// order of appearance are used; an ungrouped two-specimen sample is taken
/// as-is (normalized).
GroupPair select_group_means(const Sample& sample, const std::vector<std::string>& tags = {});

/// Parses a 1-based "i,j" baseline and validates it against k.
Baseline parse_baseline(const std::string& text, std::size_t k);

struct Extension {
  Direction direction = Direction::kLeft;
  double multiples = 1.0;
};

/// "left:2.0" style.
Extension parse_extension(const std::string& text);

struct FitOptions {
  int degree = 2;
  Baseline baseline;
  std::vector<std::string> groups;
  TrimMode trim = TrimMode::kTemplate;
  bool hull = false;  // trim to the convex hull instead of the landmark cycle
  std::vector<Extension> extensions;
  int cells = kDefaultGridCells;
  double margin = 0.1;
  int samples_per_edge = 10;
};

struct FitResult {
  LandmarkConfiguration template_config;  // two-point registered
  LandmarkConfiguration target;           // two-point registered
  PolynomialTrend trend;
  TpsModel observed_spline;
  TpsModel fitted_spline;
  GridSpec grid;        // spline panels
  GridSpec trend_grid;  // grid after extensions
  Scene scene;
};

/// Four-panel trend-fit composite for one baseline.
FitResult run_fit(const Sample& sample, const FitOptions& options);

/// Coefficients, residuals and diagnostics as JSON text.
std::string fit_report_json(const FitResult& fit, const FitOptions& options);

struct RotationOptions {
  double threshold = 0.15;
  bool nonaffine = false;
  std::vector<std::string> groups;
};

struct RotationAnalysis {
  LandmarkConfiguration template_config;  // Procrustes frame
  LandmarkConfiguration target;           // aligned to template (affine removed if requested)
  SegmentRotationReport report;
  std::vector<SegmentRotation> passing;
  Scene scene;  // full network | filtered subnetwork
};

RotationAnalysis run_rotations(const Sample& sample, const RotationOptions& options);

std::string format_rotation_table(const RotationAnalysis& analysis, const RotationOptions& options);

/// Two-point overlays for every baseline, one panel each.
Scene build_survey_scene(const GroupPair& pair);

/// Square template grid and its spline image; the kite adds projection and
/// bilinear panels.
Scene build_prototype_scene(PrototypeKind kind);

}  // namespace morphogrid
