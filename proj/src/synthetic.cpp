#include "morphogrid/synthetic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "morphogrid/error.hpp"
#include "morphogrid/trend.hpp"

namespace morphogrid {

namespace {

std::string join_coefficients(const Eigen::Matrix<double, 6, 2>& c, int col) {
  std::string out;
  char buf[40];
  for (int i = 0; i < 6; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", c(i, col));
    if (i) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& vilmann_labels() {
  static const std::vector<std::string> labels{"Bas", "Opi", "IPS", "Lam",
                                               "Brg", "SES", "ISS", "SOS"};
  return labels;
}

SyntheticVilmann make_synthetic_vilmann() {
  const std::vector<Point2> raw_template{{-3.0, -1.0}, {-4.2, 1.0}, {-3.6, 4.2}, {-1.8, 5.6},
                                         {2.6, 5.9},   {5.2, 2.3},  {2.8, 0.4},  {0.2, -0.6}};
  const Baseline baseline{2, 7};  // IPS to SOS
  const auto& labels = vilmann_labels();

  std::vector<Landmark> landmarks;
  for (std::size_t i = 0; i < labels.size(); ++i) landmarks.push_back({labels[i], raw_template[i]});
  const LandmarkConfiguration young("age7", landmarks);
  const LandmarkConfiguration registered = two_point_register(young, baseline);
  const auto p = registered.points();
  const std::size_t k = p.size();

  Eigen::Matrix<double, 6, 2> planted;
  planted.col(0) << 0.03, 1.10, -0.06, 0.12, -0.05, 0.08;
  planted.col(1) << -0.02, 0.04, 0.82, -0.06, 0.09, 0.05;

  Eigen::MatrixXd design(k, 6);
  for (std::size_t i = 0; i < k; ++i) {
    const auto basis = trend_basis(2, p[i]);
    for (int j = 0; j < 6; ++j) design(static_cast<Eigen::Index>(i), j) = basis[j];
  }
  const Eigen::MatrixXd hat = design * (design.transpose() * design).inverse() * design.transpose();
  const Eigen::MatrixXd residual_projector = Eigen::MatrixXd::Identity(k, k) - hat;

  // Perturb the non-baseline landmark whose residual-space self-weight is
  // largest, so its residual dominates every other landmark's.
  std::size_t chosen = k;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == baseline.from || i == baseline.to) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    if (chosen == k || residual_projector(ii, ii) > residual_projector(chosen, chosen)) chosen = i;
  }
  const Eigen::Vector2d direction(0.04, -0.03);
  const Eigen::MatrixXd perturbation =
      residual_projector.col(static_cast<Eigen::Index>(chosen)) * direction.transpose();
  const Eigen::MatrixXd unregistered = design * planted + perturbation;

  // Re-register the target on the baseline; a similarity keeps the model
  // class, so fold it into the planted coefficients.
  using Complex = std::complex<double>;
  const Complex a(unregistered(baseline.from, 0), unregistered(baseline.from, 1));
  const Complex b(unregistered(baseline.to, 0), unregistered(baseline.to, 1));
  const Complex factor = 1.0 / (b - a);
  Eigen::Matrix2d linear;
  linear << factor.real(), -factor.imag(), factor.imag(), factor.real();
  const Complex shift = -a * factor;
  Eigen::Matrix<double, 6, 2> coefficients = planted * linear.transpose();
  coefficients(0, 0) += shift.real();
  coefficients(0, 1) += shift.imag();

  const Eigen::MatrixXd target_registered = design * coefficients +
                                            perturbation * linear.transpose();

  // Express the target in an arbitrary raw digitizing frame.
  const double angle = 0.35;
  const double scale = 7.5;
  const Point2 offset{12.0, -4.0};
  std::vector<Landmark> old_landmarks;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = target_registered(static_cast<Eigen::Index>(i), 0);
    const double y = target_registered(static_cast<Eigen::Index>(i), 1);
    const Point2 raw{scale * (std::cos(angle) * x - std::sin(angle) * y) + offset.x,
                     scale * (std::sin(angle) * x + std::cos(angle) * y) + offset.y};
    old_landmarks.push_back({labels[i], raw});
  }
  const LandmarkConfiguration old("age150", old_landmarks);

  std::map<std::string, std::string> groups{{"age7", "age7"}, {"age150", "age150"}};
  std::map<std::string, std::string> metadata{
      {"planted_baseline", std::to_string(baseline.from + 1) + "," + std::to_string(baseline.to + 1)},
      {"planted_coefficients_x", join_coefficients(coefficients, 0)},
      {"planted_coefficients_y", join_coefficients(coefficients, 1)},
      {"perturbed_landmark", labels[chosen]},
  };

  SyntheticVilmann out;
  out.dataset.sample = Sample({young, old}, std::move(groups), std::move(metadata));
  out.dataset.provenance.sources = {"demo:synthetic-vilmann"};
  out.baseline = baseline;
  out.coefficients = coefficients;
  out.perturbed_landmark = chosen;
  return out;
}

}  // namespace morphogrid
