#include "morphogrid/maps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>

#include "morphogrid/error.hpp"

namespace morphogrid {

namespace {

constexpr double kBoxSlack = 1e-10;

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool in_box(double t) { return t >= -kBoxSlack && t <= 1.0 + kBoxSlack; }

double clamp01(double t) { return std::min(1.0, std::max(0.0, t)); }

// u from v using whichever coordinate has the better-conditioned denominator.
double solve_u(Point2 h, Point2 e, Point2 f, Point2 g, double v) {
  const double dx = e.x + g.x * v;
  const double dy = e.y + g.y * v;
  return std::abs(dx) >= std::abs(dy) ? (h.x - f.x * v) / dx : (h.y - f.y * v) / dy;
}

// One Newton step on p = A + u e + v f + u v g.
void polish(const Quad& quad, Point2 p, double& u, double& v) {
  const Point2 e = quad[1] - quad[0];
  const Point2 f = quad[3] - quad[0];
  const Point2 g = quad[0] - quad[1] + quad[2] - quad[3];
  for (int iter = 0; iter < 2; ++iter) {
    const Point2 r = bilinear_point(quad, u, v) - p;
    const Point2 du = e + v * g;
    const Point2 dv = f + u * g;
    const double det = cross(du, dv);
    if (det == 0.0) return;
    u -= cross(r, dv) / det;
    v -= cross(du, r) / det;
  }
}

Eigen::Vector3d homogeneous(Point2 p) { return {p.x, p.y, 1.0}; }

bool three_collinear(const Quad& q, double tol) {
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) t[n++] = q[i];
    const double scale = std::max({distance(t[0], t[1]), distance(t[1], t[2]), distance(t[0], t[2])});
    if (std::abs(cross(t[1] - t[0], t[2] - t[0])) <= tol * scale * scale) return true;
  }
  return false;
}

}  // namespace

Quad::Quad(std::array<Point2, 4> corners) : corners_(corners) {
  for (int i = 0; i < 4; ++i) {
    if (!is_finite(corners_[i])) {
      throw MorphoError(ErrorCode::kDegenerateQuad, "quad corner is not finite");
    }
    for (int j = i + 1; j < 4; ++j) {
      if (corners_[i] == corners_[j]) {
        throw MorphoError(ErrorCode::kDegenerateQuad, "quad corners " + std::to_string(i + 1) +
                                                          " and " + std::to_string(j + 1) +
                                                          " coincide");
      }
    }
  }
  if (segments_cross(corners_[0], corners_[1], corners_[2], corners_[3]) ||
      segments_cross(corners_[1], corners_[2], corners_[3], corners_[0])) {
    throw MorphoError(ErrorCode::kDegenerateQuad, "quad corners are not in cyclic order");
  }
}

bool Quad::is_convex() const {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2 a = corners_[i];
    const Point2 b = corners_[(i + 1) % 4];
    const Point2 c = corners_[(i + 2) % 4];
    const double z = cross(b - a, c - b);
    if (z == 0.0) return false;
    const int s = z > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

Point2 bilinear_point(const Quad& quad, double u, double v) {
  return (1 - u) * (1 - v) * quad[0] + u * (1 - v) * quad[1] + u * v * quad[2] +
         (1 - u) * v * quad[3];
}

IsoparametricCoords bilinear_coordinates(const Quad& src, Point2 p) {
  if (!src.is_convex()) {
    throw MorphoError(ErrorCode::kNonConvexSource, "bilinear source quad is not convex");
  }
  const Point2 e = src[1] - src[0];
  const Point2 f = src[3] - src[0];
  const Point2 g = src[0] - src[1] + src[2] - src[3];
  const Point2 h = p - src[0];

  // Eliminating u leaves k2 v^2 + k1 v + k0 = 0.
  const double k2 = cross(g, f);
  const double k1 = cross(e, f) + cross(h, g);
  const double k0 = cross(h, e);
  const double scale = std::max({norm(e), norm(f), norm(g)});

  std::array<double, 2> roots{};
  int nroots = 0;
  if (std::abs(k2) <= 1e-14 * scale * scale) {
    roots[nroots++] = -k0 / k1;
  } else {
    const double disc = k1 * k1 - 4.0 * k0 * k2;
    if (disc < 0.0) {
      throw MorphoError(ErrorCode::kOutsideDomain, "point lies outside the bilinear source quad");
    }
    const double q = -0.5 * (k1 + std::copysign(std::sqrt(disc), k1));
    roots[nroots++] = q / k2;
    if (q != 0.0) roots[nroots++] = k0 / q;
  }

  std::optional<IsoparametricCoords> best;
  for (int r = 0; r < nroots; ++r) {
    const double v = roots[r];
    if (!std::isfinite(v) || !in_box(v)) continue;
    const double u = solve_u(h, e, f, g, v);
    if (!std::isfinite(u) || !in_box(u)) continue;
    if (!best) {
      best = IsoparametricCoords{u, v, false};
    } else if (std::abs(best->u - u) > 1e-12 || std::abs(best->v - v) > 1e-12) {
      if (u < best->u) best = IsoparametricCoords{u, v, false};
      best->ambiguous = true;
    }
  }
  if (!best) {
    throw MorphoError(ErrorCode::kOutsideDomain, "point lies outside the bilinear source quad");
  }
  polish(src, p, best->u, best->v);
  best->u = clamp01(best->u);
  best->v = clamp01(best->v);
  return *best;
}

Point2 bilinear_eval(const Quad& src, const Quad& dst, Point2 p) {
  const auto uv = bilinear_coordinates(src, p);
  return bilinear_point(dst, uv.u, uv.v);
}

Homography homography_from_quads(const Quad& src, const Quad& dst) {
  constexpr double kCollinearTol = 1e-12;
  if (three_collinear(src, kCollinearTol) || three_collinear(dst, kCollinearTol)) {
    throw MorphoError(ErrorCode::kDegenerateQuad,
                      "three corners of a quad are collinear; no unique projective map");
  }
  // Unknowns h00 h01 h02 h10 h11 h12 h20 h21 with h22 = 1.
  Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const Point2 s = src[i];
    const Point2 d = dst[i];
    a.row(2 * i) << s.x, s.y, 1, 0, 0, 0, -s.x * d.x, -s.y * d.x;
    a.row(2 * i + 1) << 0, 0, 0, s.x, s.y, 1, -s.x * d.y, -s.y * d.y;
    b(2 * i) = d.x;
    b(2 * i + 1) = d.y;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "homography system is singular (rank " << lu.rank() << " of 8)";
    throw MorphoError(ErrorCode::kSingularSystem, msg.str());
  }
  const Eigen::Matrix<double, 8, 1> x = lu.solve(b);
  Homography h;
  h.matrix << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), 1.0;
  if (!(std::abs(h.matrix.determinant()) > 1e-12)) {
    throw MorphoError(ErrorCode::kSingularSystem, "homography is not invertible");
  }
  return h;
}

Point2 homography_eval(const Homography& h, Point2 p) {
  const Eigen::Vector3d r = h.matrix * homogeneous(p);
  if (!(std::abs(r(2)) > 1e-12)) {
    throw MorphoError(ErrorCode::kVanishingLine, "point lies on the homography's vanishing line");
  }
  return {r(0) / r(2), r(1) / r(2)};
}

const char* prototype_name(PrototypeKind kind) {
  switch (kind) {
    case PrototypeKind::kParallelogram: return "parallelogram";
    case PrototypeKind::kRotatedParallelogram: return "rotated_parallelogram";
    case PrototypeKind::kTrapezoid: return "trapezoid";
    case PrototypeKind::kKite: return "kite";
  }
  return "parallelogram";
}

PrototypeKind parse_prototype_kind(std::string_view name) {
  for (auto kind : {PrototypeKind::kParallelogram, PrototypeKind::kRotatedParallelogram,
                    PrototypeKind::kTrapezoid, PrototypeKind::kKite}) {
    if (name == prototype_name(kind)) return kind;
  }
  throw MorphoError(ErrorCode::kInvalidArgument, "unknown prototype '" + std::string(name) + "'");
}

std::pair<LandmarkConfiguration, LandmarkConfiguration> prototype_pair(PrototypeKind kind) {
  constexpr double t = kPrototypeParameter;
  const std::vector<Point2> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  const std::vector<Point2> diamond{{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  auto shear = [](const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    for (const auto& p : pts) out.push_back({p.x + t * p.y, p.y});
    return out;
  };

  std::vector<Point2> source;
  std::vector<Point2> target;
  switch (kind) {
    case PrototypeKind::kParallelogram:
      source = square;
      target = shear(square);
      break;
    case PrototypeKind::kRotatedParallelogram:
      source = diamond;
      target = shear(diamond);
      break;
    case PrototypeKind::kTrapezoid: {
      // Horizontal edges taper in opposite directions; legs keep length 2.
      const double half_height = std::sqrt(1.0 - t * t);
      source = square;
      target = {{-1 - t, -half_height}, {1 + t, -half_height}, {1 - t, half_height},
                {-1 + t, half_height}};
      break;
    }
    case PrototypeKind::kKite:
      // Vertical diagonal slides along itself; diagonals keep length and angle.
      source = diamond;
      target = {{0, -1 + t}, {1, 0}, {0, 1 + t}, {-1, 0}};
      break;
  }
  const std::string name = prototype_name(kind);
  return {LandmarkConfiguration::from_points(name + "_template", source),
          LandmarkConfiguration::from_points(name + "_target", target)};
}

}  // namespace morphogrid
