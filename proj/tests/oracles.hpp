#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "morphogrid/core.hpp"

namespace morphogrid::oracle {

using Matrix = std::vector<std::vector<double>>;

/// Gauss-Jordan elimination with partial pivoting; solves A X = B column by
/// column. A is n x n, B is n x m.
inline Matrix gauss_solve(Matrix a, Matrix b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("oracle: singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < m; ++c) b[r][c] -= f * b[col][c];
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) b[r][c] /= a[r][r];
  return b;
}

inline double kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

/// Thin-plate spline weights and affine part from the bordered system.
/// Returns (k+3) x 2: weights then (constant, x, y).
inline Matrix tps_solution(const std::vector<Point2>& p, const std::vector<Point2>& q) {
  const std::size_t k = p.size();
  Matrix a(k + 3, std::vector<double>(k + 3, 0.0));
  Matrix b(k + 3, std::vector<double>(2, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = kernel(std::hypot(p[i].x - p[j].x, p[i].y - p[j].y));
    a[i][k] = a[k][i] = 1.0;
    a[i][k + 1] = a[k + 1][i] = p[i].x;
    a[i][k + 2] = a[k + 2][i] = p[i].y;
    b[i] = {q[i].x, q[i].y};
  }
  return gauss_solve(a, b);
}

/// Ordinary least squares through explicitly formed normal equations.
/// design is k x m, rhs is k x 2; returns m x 2.
inline Matrix normal_equations(const Matrix& design, const Matrix& rhs) {
  const std::size_t k = design.size();
  const std::size_t m = design[0].size();
  Matrix xtx(m, std::vector<double>(m, 0.0));
  Matrix xty(m, std::vector<double>(rhs[0].size(), 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) xtx[a][b] += design[i][a] * design[i][b];
      for (std::size_t c = 0; c < rhs[0].size(); ++c) xty[a][c] += design[i][a] * rhs[i][c];
    }
  }
  return gauss_solve(xtx, xty);
}

/// Monomials written out longhand, independent of trend_basis.
inline std::vector<double> monomials(int degree, double x, double y) {
  std::vector<double> v{1.0, x, y};
  if (degree >= 2) {
    v.push_back(x * x);
    v.push_back(y * y);
    v.push_back(x * y);
  }
  if (degree >= 3) {
    v.push_back(x * x * x);
    v.push_back(y * y * y);
    v.push_back(x * x * y);
    v.push_back(x * y * y);
  }
  return v;
}

/// RMS residual of a least-squares polynomial t(s) of the given order.
inline double polyfit_rms(const std::vector<double>& s, const std::vector<double>& t, int order) {
  Matrix design;
  Matrix rhs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<double> row{1.0};
    for (int k = 1; k <= order; ++k) row.push_back(std::pow(s[i], k));
    design.push_back(row);
    rhs.push_back({t[i]});
  }
  const auto beta = normal_equations(design, rhs);
  double rss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double fit = 0.0;
    for (std::size_t k = 0; k < design[i].size(); ++k) fit += design[i][k] * beta[k][0];
    rss += (t[i] - fit) * (t[i] - fit);
  }
  return std::sqrt(rss / static_cast<double>(s.size()));
}

/// Hat matrix X (X'X)^{-1} X' via the normal equations.
inline Matrix hat_matrix(const Matrix& design) {
  const std::size_t k = design.size();
  Matrix identity(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) identity[i][i] = 1.0;
  const Matrix beta = normal_equations(design, identity);  // m x k
  Matrix hat(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t a = 0; a < design[0].size(); ++a) hat[i][j] += design[i][a] * beta[a][j];
  return hat;
}

/// Rotation angle minimizing the summed squared distance between a rotated,
/// centered `moving` and a centered `fixed`, by exhaustive scan.
inline double scan_rotation(const std::vector<Point2>& moving, const std::vector<Point2>& fixed,
                            double step) {
  double best_angle = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double t = -std::numbers::pi; t < std::numbers::pi; t += step) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    double ss = 0.0;
    for (std::size_t i = 0; i < moving.size(); ++i) {
      const double x = c * moving[i].x - s * moving[i].y - fixed[i].x;
      const double y = s * moving[i].x + c * moving[i].y - fixed[i].y;
      ss += x * x + y * y;
    }
    if (ss < best) {
      best = ss;
      best_angle = t;
    }
  }
  return best_angle;
}

/// Scan refined around the coarse optimum until the step falls below `tol`.
inline double refined_rotation(const std::vector<Point2>& moving, const std::vector<Point2>& fixed,
                               double tol = 1e-13) {
  double center = scan_rotation(moving, fixed, 1e-4);
  for (double step = 1e-4; step > tol; step /= 100.0) {
    double best = std::numeric_limits<double>::infinity();
    double best_angle = center;
    for (int n = -200; n <= 200; ++n) {
      const double t = center + n * step / 100.0;
      const double c = std::cos(t);
      const double s = std::sin(t);
      double ss = 0.0;
      for (std::size_t i = 0; i < moving.size(); ++i) {
        const double x = c * moving[i].x - s * moving[i].y - fixed[i].x;
        const double y = s * moving[i].x + c * moving[i].y - fixed[i].y;
        ss += x * x + y * y;
      }
      if (ss < best) {
        best = ss;
        best_angle = t;
      }
    }
    center = best_angle;
  }
  return center;
}

inline std::vector<Point2> centered_unit(const std::vector<Point2>& pts) {
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double ss = 0.0;
  for (const auto& p : pts) ss += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
  const double s = std::sqrt(ss);
  std::vector<Point2> out;
  for (const auto& p : pts) out.push_back({(p.x - cx) / s, (p.y - cy) / s});
  return out;
}

inline std::vector<Point2> rotated(const std::vector<Point2>& pts, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Point2> out;
  for (const auto& p : pts) out.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
  return out;
}

/// Distance between two normalized configurations after the optimal
/// rotation, whose angle has a closed form via the complex inner product.
/// Measured directly rather than as sqrt(2 - 2 cos), which cannot resolve
/// distances much below 1e-8.
inline double procrustes_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  const auto na = centered_unit(a);
  const auto nb = centered_unit(b);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < na.size(); ++i) {
    re += na[i].x * nb[i].x + na[i].y * nb[i].y;
    im += na[i].x * nb[i].y - na[i].y * nb[i].x;
  }
  const double c = re / std::hypot(re, im);
  const double s = -im / std::hypot(re, im);
  double ssq = 0.0;
  for (std::size_t i = 0; i < na.size(); ++i) {
    const double dx = na[i].x - (c * nb[i].x - s * nb[i].y);
    const double dy = na[i].y - (s * nb[i].x + c * nb[i].y);
    ssq += dx * dx + dy * dy;
  }
  return std::sqrt(ssq);
}

/// Fraction of uniform random points in [x0,x1]x[y0,y1] that fall inside a
/// polygon, by crossing count written independently of the library.
inline double monte_carlo_fraction(const std::vector<Point2>& poly, double x0, double x1, double y0,
                                   double y1, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1);
  std::uniform_real_distribution<double> uy(y0, y1);
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    const double x = ux(rng);
    const double y = uy(rng);
    int crossings = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i];
      const Point2 b = poly[(i + 1) % poly.size()];
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
        const double t = (y - a.y) / (b.y - a.y);
        if (x < a.x + t * (b.x - a.x)) ++crossings;
      }
    }
    inside += crossings % 2;
  }
  return static_cast<double>(inside) / samples;
}

/// Random configuration of k points in the unit square with pairwise
/// separation at least `min_sep`.
inline std::vector<Point2> random_points(std::mt19937_64& rng, std::size_t k, double min_sep = 0.02) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> pts;
  while (pts.size() < k) {
    const Point2 p{u(rng), u(rng)};
    bool ok = true;
    for (const auto& q : pts) ok = ok && std::hypot(p.x - q.x, p.y - q.y) >= min_sep;
    if (ok) pts.push_back(p);
  }
  return pts;
}

/// Perpendicular distance of the middle point from the chord of the outer two.
inline double chord_deviation(Point2 a, Point2 m, Point2 b) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  return std::abs((b.x - a.x) * (m.y - a.y) - (b.y - a.y) * (m.x - a.x)) / len;
}

}  // namespace morphogrid::oracle
