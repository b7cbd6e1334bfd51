#include "morphogrid/tps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "internal.hpp"

namespace morphogrid {

namespace {

constexpr double kMinSeparation = 1e-10;
constexpr double kCollinearRatio = 1e-10;

}  // namespace

double tps_kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

TpsModel tps_fit(const LandmarkConfiguration& template_config, const LandmarkConfiguration& target) {
  detail::require_homologous(template_config, target);
  const auto p = template_config.points();
  const auto q = target.points();
  const auto k = static_cast<Eigen::Index>(p.size());

  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (!(distance(p[i], p[j]) > kMinSeparation)) {
        throw MorphoError(ErrorCode::kCoincidentLandmarks,
                          "template landmarks " + template_config[i].label + " and " +
                              template_config[j].label + " coincide");
      }
    }
  }
  if (detail::spread_ratio(p) < kCollinearRatio) {
    throw MorphoError(ErrorCode::kCollinearTemplate,
                      "template '" + template_config.name() + "' is collinear");
  }

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(k + 3, k + 3);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double u = tps_kernel(distance(p[i], p[j]));
      system(i, j) = u;
      system(j, i) = u;
    }
    system(i, k) = system(k, i) = 1.0;
    system(i, k + 1) = system(k + 1, i) = p[i].x;
    system(i, k + 2) = system(k + 2, i) = p[i].y;
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k + 3, 2);
  for (Eigen::Index i = 0; i < k; ++i) rhs.row(i) << q[i].x, q[i].y;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "TPS system is singular (size " << (k + 3) << ", rank " << lu.rank()
        << ", rcond estimate " << lu.rcond() << ")";
    throw MorphoError(ErrorCode::kSingularSystem, msg.str());
  }
  const Eigen::MatrixXd solution = lu.solve(rhs);

  TpsModel model;
  model.template_points = p;
  model.weights = solution.topRows(k);
  model.affine = solution.bottomRows(3);
  const Eigen::MatrixXd kernel = system.topLeftCorner(k, k);
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd w = model.weights.col(c);
    model.bending_energy[c] = w.dot(kernel * w);
  }
  return model;
}

Point2 tps_eval(const TpsModel& model, Point2 p) {
  double x = model.affine(0, 0) + model.affine(1, 0) * p.x + model.affine(2, 0) * p.y;
  double y = model.affine(0, 1) + model.affine(1, 1) * p.x + model.affine(2, 1) * p.y;
  for (std::size_t i = 0; i < model.template_points.size(); ++i) {
    const double u = tps_kernel(distance(p, model.template_points[i]));
    const auto row = static_cast<Eigen::Index>(i);
    x += model.weights(row, 0) * u;
    y += model.weights(row, 1) * u;
  }
  return {x, y};
}

Eigen::Matrix2d tps_jacobian(const TpsModel& model, Point2 p) {
  Eigen::Matrix2d jac;
  jac << model.affine(1, 0), model.affine(2, 0), model.affine(1, 1), model.affine(2, 1);
  for (std::size_t i = 0; i < model.template_points.size(); ++i) {
    const Point2 d = p - model.template_points[i];
    const double r = norm(d);
    if (r == 0.0) continue;
    // dU/dx = dx (2 ln r + 1)
    const double g = 2.0 * std::log(r) + 1.0;
    const auto row = static_cast<Eigen::Index>(i);
    for (int c = 0; c < 2; ++c) {
      jac(c, 0) += model.weights(row, c) * d.x * g;
      jac(c, 1) += model.weights(row, c) * d.y * g;
    }
  }
  return jac;
}

double bending_energy(const TpsModel& model) {
  return model.bending_energy[0] + model.bending_energy[1];
}

}  // namespace morphogrid
