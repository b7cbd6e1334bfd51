#include "morphogrid/trend.hpp"

#include <Eigen/Dense>
#include <sstream>

#include "internal.hpp"

namespace morphogrid {

namespace {

// Relative singular-value floor below which the design is treated as
// rank deficient.
constexpr double kRankTolerance = 1e-10;

void check_degree(int degree) {
  if (degree < 1 || degree > 3) {
    throw MorphoError(ErrorCode::kInvalidArgument,
                      "trend degree must be 1, 2 or 3; got " + std::to_string(degree));
  }
}

}  // namespace

std::size_t trend_term_count(int degree) {
  check_degree(degree);
  static constexpr std::array<std::size_t, 4> kCounts{0, 3, 6, 10};
  return kCounts[degree];
}

std::vector<double> trend_basis(int degree, Point2 p) {
  check_degree(degree);
  const double x = p.x;
  const double y = p.y;
  std::vector<double> basis{1.0, x, y};
  if (degree >= 2) basis.insert(basis.end(), {x * x, y * y, x * y});
  if (degree >= 3) basis.insert(basis.end(), {x * x * x, y * y * y, x * x * y, x * y * y});
  return basis;
}

std::vector<std::string> trend_term_names(int degree) {
  std::vector<std::string> names{"1", "x", "y", "x^2", "y^2", "xy", "x^3", "y^3", "x^2y", "xy^2"};
  names.resize(trend_term_count(degree));
  return names;
}

PolynomialTrend trend_fit(const LandmarkConfiguration& template_config,
                          const LandmarkConfiguration& target, int degree) {
  detail::require_homologous(template_config, target);
  const std::size_t m = trend_term_count(degree);
  const std::size_t k = template_config.size();
  if (k < m) {
    throw MorphoError(ErrorCode::kInsufficientLandmarks,
                      "a degree-" + std::to_string(degree) + " trend needs at least " +
                          std::to_string(m) + " landmarks; got " + std::to_string(k));
  }

  const auto rows = static_cast<Eigen::Index>(k);
  const auto cols = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd design(rows, cols);
  Eigen::MatrixXd rhs(rows, 2);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto basis = trend_basis(degree, template_config.position(i));
    for (Eigen::Index j = 0; j < cols; ++j) design(i, j) = basis[j];
    const Point2 q = target.position(i);
    rhs.row(i) << q.x, q.y;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(cols - 1);
  if (!(smin > kRankTolerance * smax)) {
    std::ostringstream msg;
    msg << "degree-" << degree << " design matrix is rank deficient (singular values "
        << smax << " .. " << smin << "); the template points may lie on a low-degree curve";
    throw MorphoError(ErrorCode::kRankDeficient, msg.str());
  }

  PolynomialTrend trend{degree, template_config, {}, {}, {}, 0, smax / smin};
  trend.coefficients = design.colPivHouseholderQr().solve(rhs);
  const Eigen::MatrixXd fitted = design * trend.coefficients;
  trend.fitted.reserve(k);
  trend.residuals.reserve(k);
  for (Eigen::Index i = 0; i < rows; ++i) {
    trend.fitted.push_back({fitted(i, 0), fitted(i, 1)});
    trend.residuals.push_back({rhs(i, 0) - fitted(i, 0), rhs(i, 1) - fitted(i, 1)});
  }
  trend.residual_df = static_cast<int>(k - m);
  return trend;
}

Point2 trend_eval(const PolynomialTrend& trend, Point2 p) {
  const auto basis = trend_basis(trend.degree, p);
  Point2 out;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    out.x += trend.coefficients(row, 0) * basis[j];
    out.y += trend.coefficients(row, 1) * basis[j];
  }
  return out;
}

ResidualReport trend_residual_report(const PolynomialTrend& trend) {
  ResidualReport report;
  report.residual_df = trend.residual_df;
  report.saturated = trend.residual_df == 0;
  for (std::size_t i = 0; i < trend.residuals.size(); ++i) {
    const Point2 r = trend.residuals[i];
    report.landmarks.push_back({trend.template_config[i].label, r, norm(r)});
    report.rss[0] += r.x * r.x;
    report.rss[1] += r.y * r.y;
  }
  return report;
}

double trend_rss(const PolynomialTrend& trend) {
  const auto report = trend_residual_report(trend);
  return report.rss[0] + report.rss[1];
}

}  // namespace morphogrid
