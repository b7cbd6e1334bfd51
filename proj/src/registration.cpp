#include "morphogrid/registration.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "internal.hpp"

namespace morphogrid {

namespace detail {

double spread_ratio(std::span<const Point2> points) {
  const Point2 c = centroid(points);
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d d(p.x - c.x, p.y - c.y);
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  const double hi = eig.eigenvalues()(1);
  if (!(hi > 0.0)) return 0.0;
  return std::sqrt(std::max(0.0, eig.eigenvalues()(0)) / hi);
}

}  // namespace detail

namespace {

using Complex = std::complex<double>;

Complex to_complex(Point2 p) { return {p.x, p.y}; }
Point2 to_point(Complex z) { return {z.real(), z.imag()}; }

Point2 rotate(Point2 p, double c, double s) { return {c * p.x - s * p.y, s * p.x + c * p.y}; }

constexpr double kCollinearRatio = 1e-10;

}  // namespace

void Baseline::validate(std::size_t k) const {
  if (from >= k || to >= k) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "baseline (" + std::to_string(from + 1) + "," + std::to_string(to + 1) +
                          ") is out of range for " + std::to_string(k) + " landmarks");
  }
  if (from == to) {
    throw MorphoError(ErrorCode::kInvalidArgument, "baseline endpoints must differ");
  }
}

Point2 AffineMap2::apply(Point2 p) const {
  return {linear(0, 0) * p.x + linear(0, 1) * p.y + translation.x,
          linear(1, 0) * p.x + linear(1, 1) * p.y + translation.y};
}

LandmarkConfiguration two_point_register(const LandmarkConfiguration& config, Baseline baseline) {
  baseline.validate(config.size());
  const auto points = config.points();
  const Complex origin = to_complex(points[baseline.from]);
  const Complex span = to_complex(points[baseline.to]) - origin;
  double size = 0.0;
  try {
    size = centroid_size(points);
  } catch (const MorphoError&) {
    size = 0.0;
  }
  if (!(std::abs(span) > 1e-12 * size)) {
    throw MorphoError(ErrorCode::kDegenerateBaseline,
                      "baseline endpoints " + config[baseline.from].label + " and " +
                          config[baseline.to].label + " coincide in '" + config.name() + "'");
  }
  std::vector<Point2> registered;
  registered.reserve(points.size());
  for (const auto& p : points) registered.push_back(to_point((to_complex(p) - origin) / span));
  registered[baseline.from] = {0.0, 0.0};
  registered[baseline.to] = {1.0, 0.0};
  return config.with_points(registered, Units::kTwoPoint);
}

LandmarkConfiguration normalize_configuration(const LandmarkConfiguration& config) {
  const auto points = config.points();
  const Point2 c = centroid(points);
  const double size = centroid_size(points);
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back((p - c) / size);
  return config.with_points(out, Units::kProcrustes);
}

ProcrustesFit procrustes_fit(const LandmarkConfiguration& config,
                             const LandmarkConfiguration& reference) {
  detail::require_homologous(config, reference);
  const auto points = config.points();
  const auto ref = reference.points();
  const Point2 c = centroid(points);
  const double size = centroid_size(points);
  const Point2 rc = centroid(ref);
  centroid_size(ref);  // rejects a degenerate reference

  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 a = points[i] - c;
    const Point2 b = ref[i] - rc;
    sin_sum += cross(a, b);
    cos_sum += dot(a, b);
  }
  const double angle = std::atan2(sin_sum, cos_sum);
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);

  std::vector<Point2> aligned;
  aligned.reserve(points.size());
  for (const auto& p : points) aligned.push_back(rotate((p - c) / size, cs, sn));
  return {config.with_points(aligned, Units::kProcrustes), angle, 1.0 / size, c};
}

LandmarkConfiguration procrustes_align(const LandmarkConfiguration& config,
                                       const LandmarkConfiguration& reference) {
  return procrustes_fit(config, reference).aligned;
}

GpaResult generalized_procrustes(const Sample& sample, const GpaOptions& options) {
  if (sample.empty()) {
    throw MorphoError(ErrorCode::kInvalidArgument, "GPA of an empty sample");
  }
  const auto& configs = sample.configurations();
  const LandmarkConfiguration first = normalize_configuration(configs.front());
  const std::size_t k = first.size();
  const std::string mean_name = "mean";

  LandmarkConfiguration reference = first;
  std::vector<LandmarkConfiguration> aligned;
  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    aligned.clear();
    std::vector<Point2> sum(k);
    for (const auto& config : configs) {
      aligned.push_back(procrustes_align(config, reference));
      const auto& a = aligned.back();
      for (std::size_t i = 0; i < k; ++i) sum[i] = sum[i] + a.position(i);
    }
    for (auto& p : sum) p = p / static_cast<double>(configs.size());
    const LandmarkConfiguration mean =
        normalize_configuration(reference.with_points(sum, Units::kProcrustes));

    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const Point2 d = mean.position(i) - reference.position(i);
      ss += dot(d, d);
    }
    reference = mean;
    if (std::sqrt(ss / static_cast<double>(k)) < options.tolerance) {
      const LandmarkConfiguration oriented = procrustes_align(reference, first);
      std::vector<Landmark> landmarks = oriented.landmarks();
      LandmarkConfiguration named(mean_name, std::move(landmarks), Units::kProcrustes);
      std::vector<LandmarkConfiguration> final_aligned;
      final_aligned.reserve(configs.size());
      for (const auto& config : configs) final_aligned.push_back(procrustes_align(config, named));
      return {std::move(named), std::move(final_aligned), iteration};
    }
  }
  throw MorphoError(ErrorCode::kNonConvergence,
                    "GPA did not converge within " + std::to_string(options.max_iterations) +
                        " iterations");
}

LandmarkConfiguration gpa_mean(const Sample& sample, const GpaOptions& options) {
  return generalized_procrustes(sample, options).mean;
}

AffineMap2 affine_fit(const LandmarkConfiguration& template_config,
                      const LandmarkConfiguration& target) {
  detail::require_homologous(template_config, target);
  const auto p = template_config.points();
  const auto q = target.points();
  if (detail::spread_ratio(p) < kCollinearRatio) {
    throw MorphoError(ErrorCode::kCollinearTemplate,
                      "template '" + template_config.name() + "' is collinear; affine fit undefined");
  }
  const auto k = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd design(k, 3);
  Eigen::MatrixXd rhs(k, 2);
  for (Eigen::Index i = 0; i < k; ++i) {
    design.row(i) << 1.0, p[i].x, p[i].y;
    rhs.row(i) << q[i].x, q[i].y;
  }
  const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(rhs);
  AffineMap2 map;
  map.translation = {coef(0, 0), coef(0, 1)};
  map.linear << coef(1, 0), coef(2, 0), coef(1, 1), coef(2, 1);
  return map;
}

LandmarkConfiguration remove_affine(const LandmarkConfiguration& template_config,
                                    const LandmarkConfiguration& target) {
  const AffineMap2 map = affine_fit(template_config, target);
  std::vector<Point2> adjusted;
  adjusted.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const Point2 p = template_config.position(i);
    adjusted.push_back(p + (target.position(i) - map.apply(p)));
  }
  return target.with_points(adjusted, target.units());
}

}  // namespace morphogrid
