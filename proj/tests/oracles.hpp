#pragma once

// Reference values computed without the library: closed forms of the model
// surfaces and a shooting solver for rotationally symmetric k-surfaces.

#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline double coth(double x) { return std::cosh(x) / std::sinh(x); }

// Extrinsic curvature of the model surfaces of H3.
inline double sphere_kappa(double r) { return coth(r) * coth(r); }
inline double horosphere_kappa() { return 1.0; }
inline double equidistant_kappa(double r) { return std::tanh(r) * std::tanh(r); }
inline double tube_kappa(double r) { return coth(r) * std::tanh(r); }

// d/dr tanh^2 r: the linearized operator applied to f = 1 on an equidistant.
inline double equidistant_unit_response(double r) {
  const double t = std::tanh(r);
  return 2.0 * t * (1.0 - t * t);
}

// Hyperbolic distance of two half-space points.
inline double halfspace_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  return std::acosh(1.0 + (dx * dx + dy * dy + dz * dz) / (2.0 * p[2] * q[2]));
}

// Cone barrier at vertex angle zero: artanh(cos alpha) + artanh(sqrt k).
inline double cone_delta_axis(double alpha, double k) { return std::atanh(std::cos(alpha)) + std::atanh(std::sqrt(k)); }

// Profile of a k-surface of revolution in H3, in the plane of the axis.
// Points of that plane are (x1, x3, x0) on the hyperboloid x1^2 + x3^2 - x0^2
// = -1; the axis is x1 = 0 and the sphere center is (0, 0, 1). The curve
// starts on the axis at distance `a` from the center, perpendicular to it,
// bending towards the center with geodesic curvature k1 and rotational
// curvature k2 = -N1 / x1, and k1 k2 = k.
class LensProfile {
 public:
  using State = std::array<double, 9>;  // gamma, T, N

  // Shoots for the surface through the circle at polar angle `cap_angle` on
  // the sphere of radius R.
  LensProfile(double k, double R, double cap_angle, double step = 2e-4) : k_(k), R_(R), h_(step) {
    auto miss = [&](double a) { return trace(a).back().first - cap_angle; };
    double lo = 1e-3, hi = R * (1.0 - 1e-6);
    if (miss(lo) * miss(hi) > 0.0) throw std::runtime_error("shooting bracket does not straddle the cap angle");
    boost::uintmax_t iters = 200;
    auto root = boost::math::tools::toms748_solve(miss, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    apex_ = 0.5 * (root.first + root.second);
    profile_ = trace(apex_);
  }

  double apex_distance() const { return apex_; }
  const std::vector<std::pair<double, double>>& samples() const { return profile_; }

  // Distance from the sphere center at polar angle theta from the axis.
  double radius_at(double theta) const {
    if (theta <= profile_.front().first) return profile_.front().second;
    for (size_t i = 1; i < profile_.size(); ++i) {
      if (profile_[i].first >= theta) {
        const auto& [t0, r0] = profile_[i - 1];
        const auto& [t1, r1] = profile_[i];
        return r0 + (r1 - r0) * (theta - t0) / (t1 - t0);
      }
    }
    return profile_.back().second;
  }

 private:
  double k_, R_, h_, apex_ = 0.0;
  std::vector<std::pair<double, double>> profile_;

  double geodesic_curvature(const State& s) const {
    if (std::abs(s[0]) < 1e-12) return std::sqrt(k_);
    return -k_ * s[0] / s[6];
  }

  void rhs(const State& s, State& d) const {
    const double k1 = geodesic_curvature(s);
    for (int i = 0; i < 3; ++i) {
      d[i] = s[3 + i];
      d[3 + i] = s[i] + k1 * s[6 + i];
      d[6 + i] = -k1 * s[3 + i];
    }
  }

  // (polar angle, distance to center) along the curve up to the sphere.
  std::vector<std::pair<double, double>> trace(double a) const {
    State s{0.0, std::sinh(a), std::cosh(a), 1.0, 0.0, 0.0, 0.0, -std::cosh(a), -std::sinh(a)};
    boost::numeric::odeint::runge_kutta4<State> stepper;
    auto sys = [this](const State& x, State& dx, double) { rhs(x, dx); };
    std::vector<std::pair<double, double>> out{{0.0, a}};
    const double stop = std::cosh(R_);
    for (double t = 0.0; t < 20.0; t += h_) {
      State prev = s;
      stepper.do_step(sys, s, t, h_);
      if (s[2] >= stop) {
        const double w = (stop - prev[2]) / (s[2] - prev[2]);
        const double x1 = prev[0] + w * (s[0] - prev[0]), x3 = prev[1] + w * (s[1] - prev[1]);
        out.emplace_back(std::atan2(x1, x3), R_);
        return out;
      }
      out.emplace_back(std::atan2(s[0], s[1]), std::acosh(s[2]));
      if (s[0] < 0.0) break;
    }
    throw std::runtime_error("profile does not reach the sphere");
  }
};

}  // namespace oracle
