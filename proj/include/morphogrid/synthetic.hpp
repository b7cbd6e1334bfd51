#pragma once

#include <Eigen/Core>

#include "morphogrid/io.hpp"
#include "morphogrid/registration.hpp"

namespace morphogrid {

/// Eight-landmark midsagittal "octagon" pair with a planted quadratic
/// gradient and one local perturbation.
///
/// In the frame of `baseline`, the registered target equals the planted
/// quadratic image of the registered template plus a perturbation that lies
/// entirely in the residual space of the degree-2 design. A degree-2 trend
/// fit therefore recovers `coefficients` exactly, and the residuals equal the
/// perturbation, which is largest at `perturbed_landmark`.
struct SyntheticVilmann {
  Dataset dataset;  // groups "age7" (template) and "age150" (target)
  Baseline baseline;
  Eigen::Matrix<double, 6, 2> coefficients;  // basis order of trend_basis(2, .)
  std::size_t perturbed_landmark = 0;
};

SyntheticVilmann make_synthetic_vilmann();

/// Vilmann landmark abbreviations in octagon order.
const std::vector<std::string>& vilmann_labels();

}  // namespace morphogrid
