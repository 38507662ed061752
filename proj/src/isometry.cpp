#include "ksurf/isometry.hpp"

#include <cmath>

#include "ksurf/errors.hpp"

namespace ksurf {

Isometry Isometry::from_matrix(C a, C b, C c, C d) {
  C det = a * d - b * c;
  if (std::abs(det) < 1e-300) throw PreconditionError("singular_isometry", "ad - bc != 0", "singular Moebius matrix");
  C s = std::sqrt(det);
  Isometry g;
  g.a_ = a / s;
  g.b_ = b / s;
  g.c_ = c / s;
  g.d_ = d / s;
  return g;
}

Isometry Isometry::translation(double tx, double ty) { return from_matrix(1.0, C(tx, ty), 0.0, 1.0); }

Isometry Isometry::dilation(double s) {
  if (!(s > 0.0)) throw PreconditionError("invalid_dilation", "s > 0", "dilation factor must be positive");
  return from_matrix(std::sqrt(s), 0.0, 0.0, 1.0 / std::sqrt(s));
}

Isometry Isometry::rotation(double theta) {
  return from_matrix(std::polar(1.0, 0.5 * theta), 0.0, 0.0, std::polar(1.0, -0.5 * theta));
}

Isometry Isometry::swap_zero_infinity() { return from_matrix(0.0, -1.0, 1.0, 0.0); }

Isometry Isometry::random(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Isometry g = rotation(M_PI * u(rng));
  g = translation(scale * u(rng), scale * u(rng)).compose(g);
  g = dilation(std::exp(scale * u(rng))).compose(g);
  // Mild non-affine part: conjugated translation moves infinity.
  Isometry s = swap_zero_infinity();
  g = s.compose(translation(0.3 * scale * u(rng), 0.3 * scale * u(rng))).compose(s.inverse()).compose(g);
  return g;
}

Vec3 Isometry::apply(const Vec3& p) const {
  C w(p.x(), p.y());
  double h = p.z();
  C cw = c_ * w + d_;
  double den = std::norm(cw) + std::norm(c_) * h * h;
  C num = (a_ * w + b_) * std::conj(cw) + a_ * std::conj(c_) * h * h;
  C wp = num / den;
  return Vec3(wp.real(), wp.imag(), h / den);
}

IdealPoint Isometry::apply(const IdealPoint& xi) const {
  if (xi.is_infinity()) {
    if (std::abs(c_) == 0.0) return IdealPoint::infinity();
    C r = a_ / c_;
    return IdealPoint::on_plane(r.real(), r.imag());
  }
  C w(xi.plane_point().x(), xi.plane_point().y());
  C den = c_ * w + d_;
  if (std::abs(den) == 0.0) return IdealPoint::infinity();
  C r = (a_ * w + b_) / den;
  return IdealPoint::on_plane(r.real(), r.imag());
}

Vec3 Isometry::push_vector(const AmbientModel& m, const Vec3& p, const Vec3& v) const {
  double len = metric_norm(m, p, v);
  if (len == 0.0) return Vec3::Zero();
  double s = 0.5 / len;
  Vec3 q = geodesic_flow(m, p, s * v, 1.0).position;
  return log_vector(m, apply(p), apply(q)) / s;
}

Isometry Isometry::inverse() const {
  Isometry g;
  g.a_ = d_;
  g.b_ = -b_;
  g.c_ = -c_;
  g.d_ = a_;
  return g;
}

Isometry Isometry::compose(const Isometry& in) const {
  return from_matrix(a_ * in.a_ + b_ * in.c_, a_ * in.b_ + b_ * in.d_, c_ * in.a_ + d_ * in.c_,
                     c_ * in.b_ + d_ * in.d_);
}

}  // namespace ksurf
