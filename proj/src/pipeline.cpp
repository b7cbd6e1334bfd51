#include "morphogrid/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "morphogrid/error.hpp"
#include "morphogrid/maps.hpp"
#include "morphogrid/registration.hpp"
#include "morphogrid/tps.hpp"

namespace morphogrid {

namespace {

LandmarkConfiguration renamed(const LandmarkConfiguration& config, const std::string& name) {
  return LandmarkConfiguration(name, config.landmarks(), config.units());
}

LandmarkConfiguration group_mean(const Sample& sample, const std::string& tag) {
  const Sample group = sample.select_group(tag);
  if (group.empty()) {
    throw MorphoError(ErrorCode::kInvalidArgument, "no configurations in group '" + tag + "'");
  }
  return renamed(gpa_mean(group), tag.empty() ? "mean" : tag);
}

std::vector<Point2> trim_polygon(const LandmarkConfiguration& config, bool hull) {
  const auto points = config.points();
  return hull ? convex_hull(points) : points;
}

std::string segment_name(const LandmarkConfiguration& config, SegmentIndex s) {
  return config[s.i].label + "-" + config[s.j].label;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

GroupPair select_group_means(const Sample& sample, const std::vector<std::string>& tags) {
  if (sample.empty()) throw MorphoError(ErrorCode::kInvalidArgument, "dataset has no configurations");
  if (!tags.empty()) {
    if (tags.size() != 2) {
      throw MorphoError(ErrorCode::kInvalidArgument, "expected exactly two group tags");
    }
    return {group_mean(sample, tags[0]), group_mean(sample, tags[1]), tags[0], tags[1]};
  }
  const auto available = sample.group_tags();
  if (available.size() >= 2) {
    return {group_mean(sample, available[0]), group_mean(sample, available[1]), available[0],
            available[1]};
  }
  if (sample.size() == 2) {
    const auto& a = sample.configurations()[0];
    const auto& b = sample.configurations()[1];
    return {renamed(normalize_configuration(a), a.name()), renamed(normalize_configuration(b), b.name()),
            a.name(), b.name()};
  }
  throw MorphoError(ErrorCode::kInvalidArgument,
                    "need two groups (or exactly two configurations) to compare");
}

Baseline parse_baseline(const std::string& text, std::size_t k) {
  const auto comma = text.find(',');
  std::size_t from = 0;
  std::size_t to = 0;
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const auto a = std::stoll(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument(text);
    const auto tail = text.substr(comma + 1);
    const auto b = std::stoll(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
    if (a < 1 || b < 1) throw std::invalid_argument(text);
    from = static_cast<std::size_t>(a - 1);
    to = static_cast<std::size_t>(b - 1);
  } catch (const std::logic_error&) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "baseline must be two 1-based landmark numbers 'i,j'; got '" + text + "'");
  }
  Baseline baseline{from, to};
  baseline.validate(k);
  return baseline;
}

Extension parse_extension(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "extension must look like 'left:2.0'; got '" + text + "'");
  }
  Extension ext;
  ext.direction = parse_direction(text.substr(0, colon));
  try {
    std::size_t used = 0;
    const auto tail = text.substr(colon + 1);
    ext.multiples = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(tail);
  } catch (const std::logic_error&) {
    throw MorphoError(ErrorCode::kInvalidArgument, "invalid extension amount in '" + text + "'");
  }
  if (!(ext.multiples > 0.0)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "extension amount must be positive");
  }
  return ext;
}

FitResult run_fit(const Sample& sample, const FitOptions& options) {
  if (options.degree < 1 || options.degree > 3) {
    throw MorphoError(ErrorCode::kInvalidArgument, "degree must be 1, 2 or 3");
  }
  // Reject short configurations before any geometry so the message names the
  // landmark minimum.
  const std::size_t needed = trend_term_count(options.degree);
  if (sample.landmark_count() < needed) {
    throw MorphoError(ErrorCode::kInsufficientLandmarks,
                      "a degree-" + std::to_string(options.degree) + " fit requires at least " +
                          std::to_string(needed) + " landmarks; the input has " +
                          std::to_string(sample.landmark_count()));
  }
  const GroupPair pair = select_group_means(sample, options.groups);
  options.baseline.validate(pair.template_config.size());

  const auto tmpl = two_point_register(pair.template_config, options.baseline);
  const auto target = two_point_register(pair.target, options.baseline);
  PolynomialTrend trend = trend_fit(tmpl, target, options.degree);
  const auto fitted = LandmarkConfiguration("fitted", target.landmarks(), Units::kTwoPoint)
                          .with_points(trend.fitted, Units::kTwoPoint);

  TpsModel observed_spline = tps_fit(tmpl, target);
  TpsModel fitted_spline = tps_fit(tmpl, fitted);

  GridSpec grid = make_grid(tmpl, options.margin, options.cells);
  grid.samples_per_edge = options.samples_per_edge;
  GridSpec trend_grid = grid;
  for (const auto& ext : options.extensions) trend_grid = extend_grid(trend_grid, ext.direction, ext.multiples);

  const auto target_points = target.points();
  const auto fitted_points = fitted.points();
  const auto polygon =
      trim_polygon(options.trim == TrimMode::kTemplate ? tmpl : target, options.hull);
  const SegmentIndex baseline{options.baseline.from, options.baseline.to};
  const std::string tag = segment_name(tmpl, baseline);
  const std::string degree_name = "degree-" + std::to_string(options.degree) + " trend";

  Panel observed = make_grid_panel("spline, observed (" + tag + ")",
                                   deform_grid(grid, PointMap(observed_spline)),
                                   {target_points, {}, baseline, target_points});
  Panel fitted_panel = make_grid_panel("spline, fitted", deform_grid(grid, PointMap(fitted_spline)),
                                       {{}, fitted_points, std::nullopt, fitted_points});
  const DeformedGrid trend_image = deform_grid(trend_grid, PointMap(trend));
  Panel trend_panel =
      make_grid_panel(degree_name, trend_image, {target_points, fitted_points, baseline, {}});
  Panel trimmed_panel = make_grid_panel(degree_name + ", trimmed",
                                        trim_grid(trend_image, polygon, options.trim),
                                        {target_points, fitted_points, baseline, {}});

  Scene scene = compose_four_panel(std::move(observed), std::move(fitted_panel),
                                   std::move(trend_panel), std::move(trimmed_panel));
  return {tmpl,         target,          std::move(trend), std::move(observed_spline),
          std::move(fitted_spline), grid, trend_grid,      std::move(scene)};
}

std::string fit_report_json(const FitResult& fit, const FitOptions& options) {
  using Json = nlohmann::ordered_json;
  const auto& trend = fit.trend;
  const auto report = trend_residual_report(trend);
  Json doc;
  doc["degree"] = trend.degree;
  doc["baseline"] = {options.baseline.from + 1, options.baseline.to + 1};
  doc["baseline_labels"] = {fit.template_config[options.baseline.from].label,
                            fit.template_config[options.baseline.to].label};
  doc["terms"] = trend_term_names(trend.degree);
  std::vector<double> cx;
  std::vector<double> cy;
  for (Eigen::Index i = 0; i < trend.coefficients.rows(); ++i) {
    cx.push_back(trend.coefficients(i, 0));
    cy.push_back(trend.coefficients(i, 1));
  }
  doc["coefficients"] = {{"x", cx}, {"y", cy}};
  Json residuals = Json::array();
  for (const auto& r : report.landmarks) {
    residuals.push_back({{"label", r.label}, {"dx", r.residual.x}, {"dy", r.residual.y},
                         {"magnitude", r.magnitude}});
  }
  doc["residuals"] = std::move(residuals);
  doc["rss"] = {report.rss[0], report.rss[1]};
  doc["residual_df"] = report.residual_df;
  doc["saturated"] = report.saturated;
  doc["condition_number"] = trend.condition_number;
  doc["bending_energy"] = {{"observed", bending_energy(fit.observed_spline)},
                           {"fitted", bending_energy(fit.fitted_spline)}};
  return doc.dump(1) + "\n";
}

RotationAnalysis run_rotations(const Sample& sample, const RotationOptions& options) {
  const GroupPair pair = select_group_means(sample, options.groups);
  const auto tmpl = pair.template_config;
  auto target = procrustes_align(pair.target, tmpl);
  if (options.nonaffine) target = remove_affine(tmpl, target);

  RotationAnalysis analysis{tmpl, target, segment_rotations(tmpl, target), {}, {}};
  analysis.passing = filter_rotations(analysis.report, options.threshold);

  const auto all = enumerate_segments(tmpl.size());
  std::vector<SegmentIndex> subset;
  for (const auto& s : analysis.passing) subset.push_back(s.segment);
  const std::string frame = options.nonaffine ? "nonuniform" : "Procrustes";
  std::vector<Panel> panels;
  panels.push_back(make_network_panel(frame + ": all segments", tmpl.points(), target.points(), all));
  panels.push_back(make_network_panel(
      frame + ": |rotation| >= " + fmt("%g", options.threshold) + " rad", tmpl.points(),
      target.points(), subset));
  analysis.scene = compose_grid(std::move(panels), 2, kDefaultPanelSize);
  return analysis;
}

std::string format_rotation_table(const RotationAnalysis& analysis, const RotationOptions& options) {
  std::ostringstream out;
  out << "# template " << analysis.template_config.name() << " -> target "
      << analysis.target.name() << ", frame "
      << (options.nonaffine ? "procrustes, uniform component removed" : "procrustes") << "\n";
  out << "# sign convention: " << analysis.report.sign_convention << "\n";
  out << "# " << analysis.passing.size() << " of " << analysis.report.segments.size()
      << " segments with |rotation| >= " << fmt("%g", options.threshold) << " rad\n";
  out << "segment\tlabels\trotation_rad\trotation_deg\tlength_ratio\n";
  for (const auto& s : analysis.passing) {
    out << (s.segment.i + 1) << "-" << (s.segment.j + 1) << "\t"
        << segment_name(analysis.template_config, s.segment) << "\t" << fmt("%.6f", s.rotation)
        << "\t" << fmt("%.3f", s.rotation * 180.0 / std::numbers::pi) << "\t"
        << fmt("%.6f", s.length_ratio) << "\n";
  }
  return out.str();
}

Scene build_survey_scene(const GroupPair& pair) {
  const std::size_t k = pair.template_config.size();
  std::vector<Panel> panels;
  for (const auto& s : enumerate_segments(k)) {
    const Baseline baseline{s.i, s.j};
    const auto a = two_point_register(pair.template_config, baseline);
    const auto b = two_point_register(pair.target, baseline);
    panels.push_back(make_overlay_panel(std::to_string(s.i + 1) + "-" + std::to_string(s.j + 1) +
                                            " " + segment_name(a, s),
                                        a.points(), b.points(), s));
  }
  const int columns = static_cast<int>(std::max<std::size_t>(1, k - 1));
  return compose_grid(std::move(panels), columns, 240.0);
}

Scene build_prototype_scene(PrototypeKind kind) {
  const auto [tmpl, target] = prototype_pair(kind);
  const auto square = tmpl.points();
  const auto image = target.points();
  GridSpec grid = make_grid(tmpl, 0.0, 8);

  auto panel = [&](std::string title, const PointMap& map, std::vector<Point2> outline) {
    const DeformedGrid deformed = trim_grid(deform_grid(grid, map), square, TrimMode::kTemplate);
    GridPanelOptions opts;
    opts.observed = outline;
    opts.outline = std::move(outline);
    return make_grid_panel(std::move(title), deformed, opts);
  };

  std::vector<Panel> panels;
  panels.push_back(panel(std::string(prototype_name(kind)) + ": template", PointMap(IdentityMap{}), square));
  panels.push_back(panel("thin-plate spline", PointMap(tps_fit(tmpl, target)), image));
  if (kind == PrototypeKind::kKite) {
    const Quad src({square[0], square[1], square[2], square[3]});
    const Quad dst({image[0], image[1], image[2], image[3]});
    panels.push_back(panel("projection", PointMap(homography_from_quads(src, dst)), image));
    panels.push_back(panel("bilinear", PointMap(BilinearPair{src, dst}), image));
  }
  return compose_grid(std::move(panels), 2, kDefaultPanelSize);
}

}  // namespace morphogrid
