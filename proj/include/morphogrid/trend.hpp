#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "morphogrid/core.hpp"

namespace morphogrid {

/// Number of monomials for a degree: 3, 6 or 10.
std::size_t trend_term_count(int degree);

/// Monomial basis at p. Order: 1, x, y | x^2, y^2, xy | x^3, y^3, x^2 y, x y^2.
std::vector<double> trend_basis(int degree, Point2 p);

/// Names of the basis terms in the same order ("1", "x", "y", "x^2", ...).
std::vector<std::string> trend_term_names(int degree);

/// Least-squares polynomial regression of target coordinates on template
/// coordinates, one column of coefficients per output coordinate.
struct PolynomialTrend {
  int degree = 2;
  LandmarkConfiguration template_config;
  Eigen::MatrixX2d coefficients;  // m x 2
  std::vector<Point2> fitted;
  std::vector<Point2> residuals;  // target - fitted
  int residual_df = 0;            // k - m per coordinate
  double condition_number = 1.0;  // of the design matrix
};

/// Throws kInsufficientLandmarks (naming the minimum) when k < m and
/// kRankDeficient when the design matrix loses rank.
PolynomialTrend trend_fit(const LandmarkConfiguration& template_config,
                          const LandmarkConfiguration& target, int degree);

/// Defined everywhere, including far outside the landmark hull.
Point2 trend_eval(const PolynomialTrend& trend, Point2 p);

struct LandmarkResidual {
  std::string label;
  Point2 residual;
  double magnitude = 0.0;
};

struct ResidualReport {
  std::vector<LandmarkResidual> landmarks;
  std::array<double, 2> rss{0.0, 0.0};  // per coordinate
  int residual_df = 0;
  bool saturated = false;  // df == 0: the fit interpolates
};

ResidualReport trend_residual_report(const PolynomialTrend& trend);

/// Total residual sum of squares over both coordinates.
double trend_rss(const PolynomialTrend& trend);

}  // namespace morphogrid
