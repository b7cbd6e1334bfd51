#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "morphogrid/core.hpp"

namespace morphogrid {

/// Landmark pair pinned to (0,0) and (1,0) by two-point registration.
struct Baseline {
  std::size_t from = 0;
  std::size_t to = 1;

  /// Throws kInvalidArgument if from == to or either ordinal is >= k.
  void validate(std::size_t k) const;
};

/// x -> linear * x + translation.
struct AffineMap2 {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Point2 translation;

  Point2 apply(Point2 p) const;
  double determinant() const { return linear.determinant(); }
  static AffineMap2 identity() { return {}; }
};

/// Similarity (no reflection) placing landmark `baseline.from` at (0,0) and
/// `baseline.to` at (1,0). Endpoints are set exactly. Throws
/// kDegenerateBaseline when the endpoints are closer than 1e-12 times the
/// centroid size.
LandmarkConfiguration two_point_register(const LandmarkConfiguration& config, Baseline baseline);

struct ProcrustesFit {
  LandmarkConfiguration aligned;
  double rotation = 0.0;  // radians, applied after centering and scaling
  double scale = 1.0;     // factor applied to the centered input
  Point2 translation;     // subtracted before scaling (the input centroid)
};

/// Centers, scales to unit centroid size and rotates `config` onto
/// `reference` in the least-squares sense. Never reflects.
ProcrustesFit procrustes_fit(const LandmarkConfiguration& config,
                             const LandmarkConfiguration& reference);

LandmarkConfiguration procrustes_align(const LandmarkConfiguration& config,
                                       const LandmarkConfiguration& reference);

/// Centered, unit-centroid-size copy.
LandmarkConfiguration normalize_configuration(const LandmarkConfiguration& config);

struct GpaOptions {
  double tolerance = 1e-10;  // RMS movement of the mean between iterations
  int max_iterations = 100;
};

struct GpaResult {
  LandmarkConfiguration mean;
  std::vector<LandmarkConfiguration> aligned;
  int iterations = 0;
};

/// Generalized Procrustes analysis by alternating alignment and averaging.
///
/// The reference starts as the normalized first configuration. Each pass
/// aligns every specimen to the reference, averages, and rescales the
/// average to unit centroid size. The converged mean is finally rotated onto
/// the normalized first configuration, so its orientation follows that
/// specimen. Throws kNonConvergence (with the iteration count) when
/// `max_iterations` passes do not bring the RMS movement under `tolerance`.
GpaResult generalized_procrustes(const Sample& sample, const GpaOptions& options = {});

LandmarkConfiguration gpa_mean(const Sample& sample, const GpaOptions& options = {});

/// Least-squares affine map taking template landmarks onto target landmarks.
/// Throws kCollinearTemplate when the template does not span the plane.
AffineMap2 affine_fit(const LandmarkConfiguration& template_config,
                      const LandmarkConfiguration& target);

/// Target with its least-squares affine component removed:
/// p_i + (q_i - A(p_i)). Refitting affine_fit(template, result) gives the
/// identity map.
LandmarkConfiguration remove_affine(const LandmarkConfiguration& template_config,
                                    const LandmarkConfiguration& target);

}  // namespace morphogrid
