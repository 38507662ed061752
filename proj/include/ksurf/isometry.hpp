#pragma once

#include <complex>
#include <random>

#include "ksurf/ambient.hpp"

namespace ksurf {

// Orientation-preserving isometry of the half-space model, stored as the
// unit-determinant complex matrix of its boundary Moebius map.
class Isometry {
 public:
  using C = std::complex<double>;

  Isometry() = default;
  // Normalizes to determinant one; throws on a singular matrix.
  static Isometry from_matrix(C a, C b, C c, C d);
  static Isometry translation(double tx, double ty);
  static Isometry dilation(double s);
  static Isometry rotation(double theta);
  // w -> -1/w; swaps 0 and infinity, fixes (0,0,1).
  static Isometry swap_zero_infinity();
  // Random product of the generators, with parameters of size ~ scale.
  static Isometry random(std::mt19937_64& rng, double scale);

  Vec3 apply(const Vec3& p) const;
  IdealPoint apply(const IdealPoint& xi) const;
  // Differential at p applied to v.
  Vec3 push_vector(const AmbientModel& m, const Vec3& p, const Vec3& v) const;
  Isometry inverse() const;
  Isometry compose(const Isometry& inner) const;  // this o inner

  C a() const { return a_; }
  C b() const { return b_; }
  C c() const { return c_; }
  C d() const { return d_; }

 private:
  C a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
};

}  // namespace ksurf
