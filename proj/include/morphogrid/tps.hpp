#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "morphogrid/core.hpp"

namespace morphogrid {

/// Radial kernel r^2 ln r with U(0) = 0.
double tps_kernel(double r);

/// Fitted thin-plate spline for one template -> target pair.
///
/// f(p) = a0 + a1 * x + a2 * y + sum_i w_i U(|p - p_i|), one column per
/// output coordinate. Weights satisfy the side conditions sum w = 0,
/// sum w x = 0, sum w y = 0.
struct TpsModel {
  std::vector<Point2> template_points;
  Eigen::MatrixX2d weights;  // k x 2
  Eigen::Matrix<double, 3, 2> affine;  // rows: constant, x, y
  std::array<double, 2> bending_energy{0.0, 0.0};  // w^T K w per output coordinate
};

/// Solves the (k+3) x (k+3) interpolation system per output coordinate.
/// Throws kCoincidentLandmarks, kCollinearTemplate, or kSingularSystem.
TpsModel tps_fit(const LandmarkConfiguration& template_config, const LandmarkConfiguration& target);

Point2 tps_eval(const TpsModel& model, Point2 p);

/// Closed-form Jacobian of tps_eval at p; rows are output coordinates.
Eigen::Matrix2d tps_jacobian(const TpsModel& model, Point2 p);

/// Sum of the per-coordinate energies.
double bending_energy(const TpsModel& model);

}  // namespace morphogrid
