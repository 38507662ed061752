#include "ksurf/hyperboloid.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

const Eigen::Matrix4d& lorentz() {
  static const Eigen::Matrix4d G = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
  return G;
}

Vec4 unit_spacelike(const Vec4& m) {
  double q = minkowski(m, m);
  if (!(q > 0.0)) throw SolverError("degenerate_plane", "plane normal is not spacelike");
  return m / std::sqrt(q);
}

Vec4 normalize_point(const Vec4& x) {
  double q = -minkowski(x, x);
  if (!(q > 0.0) || x[3] <= 0.0) throw SolverError("degenerate_point", "vector is not timelike future-pointing");
  return x / std::sqrt(q);
}

}  // namespace

double minkowski(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]; }

Vec4 to_hyperboloid(const Vec3& p) {
  require_chart_point(p);
  double r2 = p.squaredNorm();
  double z = p.z();
  return Vec4(p.x() / z, p.y() / z, (1.0 - r2) / (2.0 * z), (1.0 + r2) / (2.0 * z));
}

Vec3 from_hyperboloid(const Vec4& x) {
  double s = x[3] + x[2];
  if (!(s > 0.0)) throw SolverError("degenerate_point", "point is not on the future sheet");
  double z = 1.0 / s;
  return Vec3(x[0] * z, x[1] * z, z);
}

Vec4 push_to_hyperboloid(const Vec3& p, const Vec3& v) {
  const double h = 1e-6 * p.z();
  return (to_hyperboloid(p + h * v) - to_hyperboloid(p - h * v)) / (2.0 * h);
}

Vec4 ideal_null_vector(const IdealPoint& xi) {
  if (xi.is_infinity()) return Vec4(0, 0, -1, 1);
  const Vec2& w = xi.plane_point();
  double r2 = w.squaredNorm();
  return Vec4(w.x(), w.y(), 0.5 * (1.0 - r2), 0.5 * (1.0 + r2));
}

double distance_to_geodesic(const Vec3& p, const IdealPoint& a, const IdealPoint& b) {
  Vec4 A = ideal_null_vector(a), B = ideal_null_vector(b), x = to_hyperboloid(p);
  double ab = minkowski(A, B);
  if (!(std::abs(ab) > 1e-300)) throw PreconditionError("degenerate_geodesic", "distinct endpoints", "geodesic endpoints coincide");
  double s2 = -1.0 - 2.0 * minkowski(x, A) * minkowski(x, B) / ab;
  return std::asinh(std::sqrt(std::max(0.0, s2)));
}

IdealPoint ideal_point_of(const Vec4& n) {
  double s = n[3] + n[2];
  double scale = n.norm();
  if (std::abs(s) <= 1e-12 * scale) return IdealPoint::infinity();
  return IdealPoint::on_plane(n[0] / s, n[1] / s);
}

double HyperbolicPlane::signed_distance(const Vec3& p) const { return std::asinh(minkowski(to_hyperboloid(p), m)); }

HyperbolicPlane HyperbolicPlane::shifted(const Vec4& foot, double s) const {
  return {unit_spacelike(std::sinh(s) * foot + std::cosh(s) * m)};
}

Vec3 HyperbolicPlane::project(const Vec3& p) const {
  Vec4 x = to_hyperboloid(p);
  return from_hyperboloid(normalize_point(x - minkowski(x, m) * m));
}

HyperbolicPlane plane_through_ideal(const IdealPoint& a, const IdealPoint& b, const IdealPoint& c) {
  Eigen::Matrix<double, 3, 4> A;
  A.row(0) = (lorentz() * ideal_null_vector(a)).transpose();
  A.row(1) = (lorentz() * ideal_null_vector(b)).transpose();
  A.row(2) = (lorentz() * ideal_null_vector(c)).transpose();
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(A);
  if (lu.rank() < 3) throw PreconditionError("degenerate_ideal_triple", "three distinct ideal points", "ideal points coincide");
  Vec4 m = lu.kernel().col(0);
  return {unit_spacelike(m)};
}

HyperbolicPlane best_fit_plane(const std::vector<Vec3>& points) {
  if (points.size() < 3) throw PreconditionError("too_few_points", ">= 3 points", "plane fit needs three points");
  Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
  for (const auto& p : points) {
    Vec4 x = lorentz() * to_hyperboloid(p);
    S += x * x.transpose();
  }
  S += 1e-14 * S.trace() * Eigen::Matrix4d::Identity();
  // Stationary points of sum <x,m>^2 on <m,m> = 1: G m = nu S m; the best
  // plane has the largest nu.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix4d> es(lorentz(), S);
  if (es.info() != Eigen::Success) throw SolverError("plane_fit_failed", "generalized eigensolver failed");
  Vec4 m = es.eigenvectors().col(3);
  return {unit_spacelike(m)};
}

HyperbolicCircle fit_circle(const std::vector<Vec3>& points) {
  HyperbolicCircle c;
  c.plane = best_fit_plane(points);
  Vec4 sum = Vec4::Zero();
  for (const auto& p : points) sum += to_hyperboloid(p);
  Vec4 ctr = normalize_point(sum);
  ctr = normalize_point(ctr - minkowski(ctr, c.plane.m) * c.plane.m);
  c.center = ctr;
  double r = 0.0;
  for (const auto& p : points) r += std::acosh(std::max(1.0, -minkowski(to_hyperboloid(p), ctr)));
  c.radius = r / static_cast<double>(points.size());
  return c;
}

HyperbolicPlane equidistant_carrier(const HyperbolicCircle& circle, double r) {
  if (!(r > 0.0)) throw PreconditionError("invalid_equidistant", "r > 0", "equidistant distance must be positive");
  double s = std::asinh(std::sinh(r) / std::cosh(circle.radius));
  return circle.plane.shifted(circle.center, -s);
}

}  // namespace ksurf
