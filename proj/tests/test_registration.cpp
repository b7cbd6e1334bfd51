#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "morphogrid/error.hpp"
#include "morphogrid/registration.hpp"
#include "oracles.hpp"

namespace morphogrid {
namespace {

constexpr double kPi = std::numbers::pi;

LandmarkConfiguration make(const std::vector<Point2>& pts, const std::string& name = "c") {
  return LandmarkConfiguration::from_points(name, pts);
}

std::vector<Point2> similarity(const std::vector<Point2>& pts, double angle, double scale, Point2 shift) {
  std::vector<Point2> out;
  for (const auto& p : oracle::rotated(pts, angle)) out.push_back(p * scale + shift);
  return out;
}

void expect_points_near(const LandmarkConfiguration& c, const std::vector<Point2>& expected, double tol) {
  ASSERT_EQ(c.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(c.position(i).x, expected[i].x, tol) << "landmark " << i;
    EXPECT_NEAR(c.position(i).y, expected[i].y, tol) << "landmark " << i;
  }
}

TEST(TwoPoint, HalvesWithoutRotation) {
  const auto out = two_point_register(make({{0, 0}, {2, 0}, {1, 1}}), {0, 1});
  expect_points_near(out, {{0, 0}, {1, 0}, {0.5, 0.5}}, 1e-15);
  EXPECT_EQ(out.units(), Units::kTwoPoint);
}

TEST(TwoPoint, AlreadyRegisteredIsUnchanged) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {0.3, 0.7}, {0.9, -0.2}};
  expect_points_near(two_point_register(make(pts), {0, 1}), pts, 1e-15);
}

TEST(TwoPoint, MatchesHomogeneousMatrixProduct) {
  // translate by (-1,-1), rotate by -90 degrees, scale by 1/2
  const double t[3][3] = {{1, 0, -1}, {0, 1, -1}, {0, 0, 1}};
  const double r[3][3] = {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}};
  const double s[3][3] = {{0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 1}};
  auto mul = [](const double a[3][3], const double b[3][3], double c[3][3]) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        c[i][j] = 0;
        for (int n = 0; n < 3; ++n) c[i][j] += a[i][n] * b[n][j];
      }
  };
  double rt[3][3];
  double m[3][3];
  mul(r, t, rt);
  mul(s, rt, m);
  const std::vector<Point2> in{{1, 1}, {1, 3}, {0, 1}};
  std::vector<Point2> expected;
  for (const auto& p : in) expected.push_back({m[0][0] * p.x + m[0][1] * p.y + m[0][2], m[1][0] * p.x + m[1][1] * p.y + m[1][2]});
  expect_points_near(make(expected), {{0, 0}, {1, 0}, {0, 0.5}}, 1e-15);

  const auto out = two_point_register(make(in), {0, 1});
  expect_points_near(out, expected, 1e-12);
}

TEST(TwoPoint, EndpointsExactAndIdempotent) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracle::random_points(rng, 8);
    const Baseline b{static_cast<std::size_t>(trial % 8), static_cast<std::size_t>((trial + 3) % 8)};
    const auto once = two_point_register(make(pts), b);
    EXPECT_EQ(once.position(b.from), (Point2{0, 0}));
    EXPECT_EQ(once.position(b.to), (Point2{1, 0}));
    const auto twice = two_point_register(once, b);
    expect_points_near(twice, once.points(), 1e-12);
  }
}

TEST(TwoPoint, InvariantUnderSimilarity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracle::random_points(rng, 8);
    const auto moved = similarity(pts, angle(rng), scale(rng), {shift(rng), shift(rng)});
    const auto a = two_point_register(make(pts), {2, 7});
    const auto b = two_point_register(make(moved), {2, 7});
    expect_points_near(b, a.points(), 1e-9);
  }
}

TEST(TwoPoint, CoincidentBaselineRejected) {
  try {
    two_point_register(make({{0, 0}, {0, 0}, {1, 1}}), {0, 1});
    FAIL() << "expected an error";
  } catch (const MorphoError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateBaseline);
  }
}

TEST(TwoPoint, InvalidBaselineRejected) {
  const auto c = make({{0, 0}, {1, 0}, {1, 1}});
  EXPECT_THROW(two_point_register(c, {1, 1}), MorphoError);
  EXPECT_THROW(two_point_register(c, {0, 3}), MorphoError);
}

TEST(Procrustes, SelfAlignment) {
  const auto ref = make({{1, 2}, {4, 2}, {3, 6}, {0, 5}});
  const auto fit = procrustes_fit(ref, ref);
  EXPECT_NEAR(fit.rotation, 0.0, 1e-15);
  expect_points_near(fit.aligned, oracle::centered_unit(ref.points()), 1e-14);
  EXPECT_EQ(fit.aligned.units(), Units::kProcrustes);
}

TEST(Procrustes, RemovesRotationAndScale) {
  const std::vector<Point2> ref{{1, 2}, {4, 2}, {3, 6}, {0, 5}};
  const auto moved = similarity(ref, kPi / 6, 3.0, {5, -2});
  const auto aligned = procrustes_align(make(moved), make(ref));
  expect_points_near(aligned, oracle::centered_unit(ref), 1e-9);
}

TEST(Procrustes, QuarterTurnAgreesWithScan) {
  const std::vector<Point2> config{{0, 0}, {1, 0}, {0, 1}};
  const std::vector<Point2> ref{{0, 0}, {0, 1}, {-1, 0}};
  const auto fit = procrustes_fit(make(config), make(ref));
  EXPECT_NEAR(fit.rotation, kPi / 2, 1e-12);
  const double scanned = oracle::scan_rotation(oracle::centered_unit(config), oracle::centered_unit(ref), 1e-4);
  EXPECT_NEAR(fit.rotation, scanned, 1e-4);
}

TEST(Procrustes, MatchesRefinedScanOnRandomShapes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_points(rng, 6);
    const auto b = oracle::random_points(rng, 6);
    const auto fit = procrustes_fit(make(a), make(b));
    const double angle = oracle::refined_rotation(oracle::centered_unit(a), oracle::centered_unit(b));
    // SSQ is flat to rounding within ~sqrt(eps) of its minimum
    EXPECT_NEAR(std::remainder(fit.rotation - angle, 2 * kPi), 0.0, 1e-7);
  }
}

TEST(Procrustes, NeverReflects) {
  // The mirror image of the reference is the worst case for a rotation-only fit.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ref = oracle::random_points(rng, 7);
    std::vector<Point2> mirrored;
    for (const auto& p : ref) mirrored.push_back({-p.x, p.y});
    const auto fit = procrustes_fit(make(mirrored), make(ref));
    const auto map = affine_fit(normalize_configuration(make(mirrored)), fit.aligned);
    EXPECT_NEAR(map.determinant(), 1.0, 1e-9);
    EXPECT_NEAR(map.linear(0, 0), std::cos(fit.rotation), 1e-9);
    EXPECT_NEAR(map.linear(1, 0), std::sin(fit.rotation), 1e-9);
  }
}

Sample sample_of(const std::vector<std::vector<Point2>>& forms) {
  std::vector<LandmarkConfiguration> configs;
  for (std::size_t i = 0; i < forms.size(); ++i) configs.push_back(make(forms[i], "s" + std::to_string(i)));
  return Sample(configs, {}, {});
}

TEST(Gpa, IdenticalCopiesConvergeImmediately) {
  const std::vector<Point2> pts{{0, 0}, {3, 1}, {2, 4}, {-1, 2}};
  const auto result = generalized_procrustes(sample_of({pts, pts, pts}));
  EXPECT_EQ(result.iterations, 1);
  expect_points_near(result.mean, oracle::centered_unit(pts), 1e-14);
  EXPECT_EQ(result.mean.units(), Units::kProcrustes);
}

TEST(Gpa, SimilarityCopiesShareOneShape) {
  const std::vector<Point2> pts{{0, 0}, {3, 1}, {2, 4}, {-1, 2}, {1, -2}};
  std::vector<std::vector<Point2>> forms{pts};
  forms.push_back(similarity(pts, 0.7, 2.5, {3, 3}));
  forms.push_back(similarity(pts, -2.1, 0.4, {-8, 1}));
  const auto mean = gpa_mean(sample_of(forms));
  for (const auto& f : forms) EXPECT_LT(oracle::procrustes_distance(mean.points(), f), 1e-9);
}

TEST(Gpa, TwoTrianglesMatchBruteForceMean) {
  const std::vector<Point2> a{{0, 0}, {1, 0}, {0, 1}};
  const std::vector<Point2> b{{0, 0}, {1, 0}, {0, 2}};
  const auto na = oracle::centered_unit(a);
  const auto nb = oracle::centered_unit(b);
  const auto rb = oracle::rotated(nb, oracle::refined_rotation(nb, na));
  std::vector<Point2> avg;
  for (std::size_t i = 0; i < 3; ++i) avg.push_back((na[i] + rb[i]) / 2.0);
  const auto expected = oracle::centered_unit(avg);

  const auto mean = gpa_mean(sample_of({a, b}));
  expect_points_near(mean, expected, 1e-9);
}

TEST(Gpa, CenteredAndUnitSize) {
  std::mt19937_64 rng(17);
  std::vector<std::vector<Point2>> forms;
  for (int i = 0; i < 12; ++i) forms.push_back(oracle::random_points(rng, 8));
  const auto mean = gpa_mean(sample_of(forms));
  const Point2 c = centroid(mean);
  EXPECT_NEAR(c.x, 0.0, 1e-10);
  EXPECT_NEAR(c.y, 0.0, 1e-10);
  EXPECT_NEAR(centroid_size(mean), 1.0, 1e-10);
}

TEST(Gpa, InvariantUnderPerSpecimenSimilarities) {
  // The mean is oriented onto the first specimen, so it turns with that
  // specimen's pre-rotation and is otherwise unchanged.
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  std::vector<std::vector<Point2>> forms;
  for (int i = 0; i < 10; ++i) forms.push_back(oracle::random_points(rng, 7));
  const auto base = gpa_mean(sample_of(forms));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<Point2>> moved;
    double first_angle = 0.0;
    for (const auto& f : forms) {
      const double t = angle(rng);
      if (moved.empty()) first_angle = t;
      moved.push_back(similarity(f, t, scale(rng), {shift(rng), shift(rng)}));
    }
    const auto mean = gpa_mean(sample_of(moved));
    expect_points_near(mean, oracle::rotated(base.points(), first_angle), 1e-8);
  }
}

TEST(Gpa, NonConvergenceReportsIterations) {
  std::mt19937_64 rng(23);
  std::vector<std::vector<Point2>> forms;
  for (int i = 0; i < 5; ++i) forms.push_back(oracle::random_points(rng, 6));
  try {
    generalized_procrustes(sample_of(forms), {1e-30, 1});
    FAIL() << "expected an error";
  } catch (const MorphoError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonConvergence);
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos);
  }
}

TEST(Gpa, DegenerateSpecimenRejected) {
  EXPECT_THROW(gpa_mean(sample_of({{{0, 0}, {1, 0}, {0, 1}}, {{2, 2}, {2, 2}, {2, 2}}})), MorphoError);
}

TEST(AffineFit, RecoversExactMap) {
  const std::vector<Point2> tmpl{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.4, 0.3}};
  std::vector<Point2> target;
  for (const auto& p : tmpl) target.push_back({1.5 * p.x - 0.3 * p.y + 2, 0.2 * p.x + 0.8 * p.y - 1});
  const auto map = affine_fit(make(tmpl), make(target));
  EXPECT_NEAR(map.linear(0, 0), 1.5, 1e-12);
  EXPECT_NEAR(map.linear(0, 1), -0.3, 1e-12);
  EXPECT_NEAR(map.linear(1, 0), 0.2, 1e-12);
  EXPECT_NEAR(map.linear(1, 1), 0.8, 1e-12);
  EXPECT_NEAR(map.translation.x, 2, 1e-12);
  EXPECT_NEAR(map.translation.y, -1, 1e-12);
  for (std::size_t i = 0; i < tmpl.size(); ++i) EXPECT_LT(distance(map.apply(tmpl[i]), target[i]), 1e-10);
}

TEST(AffineFit, IdentityForSelf) {
  const auto c = make({{0, 0}, {2, 1}, {1, 3}});
  const auto map = affine_fit(c, c);
  EXPECT_LT((map.linear - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(norm(map.translation), 1e-12);
}

TEST(AffineFit, DisplacedCornerMatchesNormalEquations) {
  const std::vector<Point2> tmpl{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Point2> target{{0, 0}, {1, 0}, {1.1, 1}, {0, 1}};
  oracle::Matrix design;
  oracle::Matrix rhs;
  for (std::size_t i = 0; i < 4; ++i) {
    design.push_back({1.0, tmpl[i].x, tmpl[i].y});
    rhs.push_back({target[i].x, target[i].y});
  }
  const auto beta = oracle::normal_equations(design, rhs);
  const auto map = affine_fit(make(tmpl), make(target));
  EXPECT_NEAR(map.translation.x, beta[0][0], 1e-12);
  EXPECT_NEAR(map.translation.y, beta[0][1], 1e-12);
  EXPECT_NEAR(map.linear(0, 0), beta[1][0], 1e-12);
  EXPECT_NEAR(map.linear(0, 1), beta[2][0], 1e-12);
  EXPECT_NEAR(map.linear(1, 0), beta[1][1], 1e-12);
  EXPECT_NEAR(map.linear(1, 1), beta[2][1], 1e-12);
  // by hand: x' = -0.025 + 1.05 x + 0.05 y
  EXPECT_NEAR(map.translation.x, -0.025, 1e-12);
  EXPECT_NEAR(map.linear(0, 0), 1.05, 1e-12);
}

TEST(AffineFit, CollinearTemplateRejected) {
  try {
    affine_fit(make({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), make({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
    FAIL() << "expected an error";
  } catch (const MorphoError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCollinearTemplate);
  }
}

void expect_identity_refit(const LandmarkConfiguration& tmpl, const LandmarkConfiguration& adjusted) {
  const auto map = affine_fit(tmpl, adjusted);
  EXPECT_LT((map.linear - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(norm(map.translation), 1e-9);
}

TEST(RemoveAffine, AffineTargetCollapsesToTemplate) {
  const std::vector<Point2> tmpl{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.3, 0.6}};
  std::vector<Point2> target;
  for (const auto& p : tmpl) target.push_back({2 * p.x + p.y + 1, -p.x + 0.5 * p.y});
  expect_points_near(remove_affine(make(tmpl), make(target)), tmpl, 1e-12);
  expect_points_near(remove_affine(make(tmpl), make(tmpl)), tmpl, 1e-12);
}

TEST(RemoveAffine, KiteKeepsBendOnly) {
  const auto tmpl = make({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto kite = make({{-1, -1}, {1, -1}, {1.5, 1.5}, {-1, 1}});
  const auto adjusted = remove_affine(tmpl, kite);
  expect_identity_refit(tmpl, adjusted);
  double moved = 0.0;
  for (std::size_t i = 0; i < 4; ++i) moved += distance(adjusted.position(i), tmpl.position(i));
  EXPECT_GT(moved, 0.1);
}

TEST(RemoveAffine, RandomPairsRefitToIdentity) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tmpl = make(oracle::random_points(rng, 8));
    const auto target = make(oracle::random_points(rng, 8));
    const auto adjusted = remove_affine(tmpl, target);
    expect_identity_refit(tmpl, adjusted);
    EXPECT_EQ(adjusted.units(), target.units());
  }
}

}  // namespace
}  // namespace morphogrid
