#include "ksurf/ambient.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

constexpr double kGeodesicTol = 1e-11;

bool finite3(const Vec3& v) { return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z()); }

// Flat symmetric tensor whose restriction to a plane gives minus the
// sectional curvature times exp(2u): Hess u - du du + |du|^2/2.
Mat3 schouten(const ConformalJet& j) {
  return j.hess - j.grad * j.grad.transpose() + 0.5 * j.grad.squaredNorm() * Mat3::Identity();
}

// Any two flat-orthonormal vectors completing n-hat.
void complete_frame(const Vec3& nhat, Vec3& a, Vec3& b) {
  Vec3 seed = Vec3::UnitX();
  if (std::abs(nhat.x()) > std::abs(nhat.y())) seed = Vec3::UnitY();
  if (std::abs(nhat.z()) < std::min(std::abs(nhat.x()), std::abs(nhat.y()))) seed = Vec3::UnitZ();
  a = (seed - seed.dot(nhat) * nhat).normalized();
  b = nhat.cross(a);
}

// 1 - w for |w| <= 1 without cancellation near w = 1.
double one_minus(double w, double wh2) { return w > 0.0 ? wh2 / (1.0 + w) : 1.0 - w; }

GeodesicState hyperbolic_flow(const Vec3& p, const Vec3& v, double t) {
  double vn = v.norm();
  if (vn == 0.0 || t == 0.0) return {p, v};
  double sgn = t < 0.0 ? -1.0 : 1.0;
  Vec3 w = sgn * v / vn;
  double tau = std::abs(t) * vn / p.z();
  if (tau > 300.0) throw SolverError("geodesic_overflow", "geodesic leaves the representable chart region");
  Vec2 wh(w.x(), w.y());
  double wh2 = wh.squaredNorm();
  double T = std::tanh(tau);
  double sech = 1.0 / std::cosh(tau);
  double omT = 2.0 / (std::exp(2.0 * tau) + 1.0);
  double omw = one_minus(w.z(), wh2);
  double D = omT + T * omw;
  double qz = p.z() * sech / D;
  Vec3 q(p.x() + p.z() * T * wh.x() / D, p.y() + p.z() * T * wh.y() / D, qz);
  double speed = vn / p.z();
  Vec3 vel(qz * sech * wh.x() / D, qz * sech * wh.y() / D, -qz * (omw - omT) / D);
  return {q, sgn * speed * vel};
}

Vec3 hyperbolic_log(const Vec3& p, const Vec3& q) {
  Vec3 d = q - p;
  double dn = d.norm();
  if (dn == 0.0) return Vec3::Zero();
  double t = 2.0 * std::asinh(dn / (2.0 * std::sqrt(p.z() * q.z())));
  double ratio = t < 1e-8 ? 1.0 : t / std::sinh(t);
  double sh = std::sinh(0.5 * t);
  Vec3 w(d.x(), d.y(), d.z() + 2.0 * q.z() * sh * sh);
  return p.z() * ratio * w / q.z();
}

double hyperbolic_distance(const Vec3& p, const Vec3& q) {
  return 2.0 * std::asinh((q - p).norm() / (2.0 * std::sqrt(p.z() * q.z())));
}

using State = std::array<double, 6>;

GeodesicState numeric_flow(const AmbientModel& m, const Vec3& p, const Vec3& v, double t) {
  if (t == 0.0 || v.norm() == 0.0) return {p, v};
  double sgn = t < 0.0 ? -1.0 : 1.0;
  double tend = std::abs(t);
  State x{p.x(), p.y(), p.z(), sgn * v.x(), sgn * v.y(), sgn * v.z()};
  auto rhs = [&m](const State& s, State& ds, double) {
    Vec3 pos(s[0], s[1], s[2]);
    Vec3 vel(s[3], s[4], s[5]);
    if (!(pos.z() > 0.0)) {
      ds.fill(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    Vec3 gu = m.log_factor_gradient(pos);
    Vec3 acc = -2.0 * gu.dot(vel) * vel + vel.squaredNorm() * gu;
    for (int i = 0; i < 3; ++i) {
      ds[i] = s[3 + i];
      ds[3 + i] = acc[i];
    }
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(kGeodesicTol, kGeodesicTol, ode::runge_kutta_dopri5<State>());
  double tc = 0.0;
  double dt = std::min(0.05, tend);
  int steps = 0;
  while (tc < tend) {
    if (tc + dt > tend) dt = tend - tc;
    auto res = stepper.try_step(rhs, x, tc, dt);
    if (res == ode::fail) {
      if (dt < 1e-14 * std::max(1.0, tend))
        throw SolverError("integrator_step_underflow", "geodesic integrator step underflow");
      continue;
    }
    if (++steps > 200000) throw SolverError("integrator_step_limit", "geodesic integrator exceeded step limit");
  }
  Vec3 q(x[0], x[1], x[2]);
  Vec3 vel(x[3], x[4], x[5]);
  if (!finite3(q) || !(q.z() > 0.0))
    throw SolverError("integrator_failure", "geodesic integration left the chart");
  return {q, sgn * vel};
}

Vec3 numeric_log(const AmbientModel& m, const Vec3& p, const Vec3& q) {
  if ((q - p).norm() == 0.0) return Vec3::Zero();
  Vec3 v = hyperbolic_log(p, q);
  double scale = q.z();
  for (int it = 0; it < 40; ++it) {
    Vec3 r = numeric_flow(m, p, v, 1.0).position - q;
    if (r.norm() <= 1e-12 * scale) return v;
    Mat3 J;
    double h = 1e-6 * std::max(v.norm(), 1e-3 * p.z());
    for (int c = 0; c < 3; ++c) {
      Vec3 dv = Vec3::Zero();
      dv[c] = h;
      J.col(c) = (numeric_flow(m, p, v + dv, 1.0).position - numeric_flow(m, p, v - dv, 1.0).position) / (2 * h);
    }
    v -= J.partialPivLu().solve(r);
  }
  throw SolverError("log_map_no_convergence", "geodesic shooting for the log map did not converge");
}

Vec3 ray_direction(const Vec3& b, const IdealPoint& xi) {
  if (xi.is_infinity()) return Vec3(0, 0, b.z());
  Vec3 target(xi.plane_point().x(), xi.plane_point().y(), 0.0);
  double eps = 1e-12 * std::max(1.0, (target - b).norm());
  target.z() = eps;
  return b.z() * hyperbolic_log(b, target).normalized();
}

}  // namespace

ChartPoint::ChartPoint(double x, double y, double z) : ChartPoint(Vec3(x, y, z)) {}

ChartPoint::ChartPoint(const Vec3& c) : c_(c) { require_chart_point(c); }

void require_chart_point(const Vec3& p) {
  if (!finite3(p) || !(p.z() > 0.0))
    throw PreconditionError("invalid_chart_point", "z > 0", "chart point must have finite coordinates and z > 0");
}

IdealPoint IdealPoint::infinity() { return IdealPoint(); }

IdealPoint IdealPoint::on_plane(double x, double y) {
  IdealPoint p;
  p.infinite_ = false;
  p.xy_ = Vec2(x, y);
  return p;
}

AmbientModel AmbientModel::hyperbolic() { return AmbientModel(); }

AmbientModel AmbientModel::warped(std::vector<WarpBump> bumps, double c, const CertificationRegion& region) {
  if (!(c > 0.0)) throw PreconditionError("invalid_curvature_bound", "c > 0", "curvature bound c must be positive");
  for (const auto& b : bumps) {
    if (!(b.amplitude > -1.0) || !(b.width > 0.0))
      throw PreconditionError("invalid_warp", "positive conformal factor", "warp bump must keep the factor positive");
  }
  AmbientModel m;
  m.kind_ = ModelKind::WarpedMetric;
  m.c_ = c;
  m.bumps_ = std::move(bumps);
  int n = std::max(2, region.samples_per_axis);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 s(double(i) / (n - 1), double(j) / (n - 1), double(k) / (n - 1));
        Vec3 p = region.lo + s.cwiseProduct(region.hi - region.lo);
        worst = std::max(worst, max_sectional_curvature(m, p));
      }
  m.certified_max_ = worst;
  if (worst > -c + 1e-6)
    throw PreconditionError("curvature_bound_not_certified", "sec <= -c",
                            "sampled sectional curvature " + std::to_string(worst) + " exceeds -c");
  return m;
}

AmbientModel AmbientModel::with_fault(FaultInjection f) const {
  AmbientModel m = *this;
  m.fault_ = f;
  return m;
}

ConformalJet AmbientModel::jet(const Vec3& p) const {
  ConformalJet j;
  double z = p.z();
  j.u = -std::log(z);
  j.grad = Vec3(0, 0, -1.0 / z);
  j.hess(2, 2) = 1.0 / (z * z);
  for (const auto& b : bumps_) {
    Vec3 d = p - b.center;
    double w2 = b.width * b.width;
    double G = std::exp(-d.squaredNorm() / (2 * w2));
    double phi = 1.0 + b.amplitude * G;
    Vec3 gG = -G * d / w2;
    Mat3 hG = G * (d * d.transpose() / (w2 * w2) - Mat3::Identity() / w2);
    j.u += std::log(phi);
    j.grad += b.amplitude * gG / phi;
    j.hess += b.amplitude * hG / phi - b.amplitude * b.amplitude * gG * gG.transpose() / (phi * phi);
  }
  return j;
}

double AmbientModel::log_factor(const Vec3& p) const {
  double u = -std::log(p.z());
  for (const auto& b : bumps_) {
    double G = std::exp(-(p - b.center).squaredNorm() / (2 * b.width * b.width));
    u += std::log(1.0 + b.amplitude * G);
  }
  return u;
}

Vec3 AmbientModel::log_factor_gradient(const Vec3& p) const {
  Vec3 g(0, 0, -1.0 / p.z());
  for (const auto& b : bumps_) {
    Vec3 d = p - b.center;
    double w2 = b.width * b.width;
    double G = std::exp(-d.squaredNorm() / (2 * w2));
    g += b.amplitude * (-G * d / w2) / (1.0 + b.amplitude * G);
  }
  return g;
}

double metric_inner(const AmbientModel& m, const Vec3& p, const Vec3& a, const Vec3& b) {
  return std::exp(2.0 * m.log_factor(p)) * a.dot(b);
}

double metric_norm(const AmbientModel& m, const Vec3& p, const Vec3& a) {
  return std::exp(m.log_factor(p)) * a.norm();
}

Vec3 metric_normalize(const AmbientModel& m, const Vec3& p, const Vec3& a) {
  return a / metric_norm(m, p, a);
}

MetricAndConnection metric_and_connection(const AmbientModel& m, const ChartPoint& p) {
  require_chart_point(p.coords());
  ConformalJet j = m.jet(p.coords());
  MetricAndConnection out;
  out.metric = std::exp(2.0 * j.u) * Mat3::Identity();
  for (int k = 0; k < 3; ++k) {
    Mat3 G = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int jj = 0; jj < 3; ++jj) {
        double v = 0.0;
        if (i == k) v += j.grad[jj];
        if (jj == k) v += j.grad[i];
        if (i == jj) v -= j.grad[k];
        G(i, jj) = v;
      }
    out.christoffel[k] = G;
  }
  return out;
}

Mat2 curvature_in_frame(const AmbientModel& m, const Vec3& p, const Vec3& n, const Vec3& e1, const Vec3& e2) {
  ConformalJet j = m.jet(p);
  Mat3 A = schouten(j);
  Vec3 nh = n.normalized();
  Vec3 a = e1.normalized();
  Vec3 b = e2.normalized();
  double ann = nh.dot(A * nh);
  Mat2 w;
  w(0, 0) = ann + a.dot(A * a);
  w(1, 1) = ann + b.dot(A * b);
  w(0, 1) = w(1, 0) = a.dot(A * b);
  w *= std::exp(-2.0 * j.u);
  if (m.fault() == FaultInjection::FlipCurvatureSign) w = -w;
  return w;
}

CurvatureEndomorphism curvature_endomorphism(const AmbientModel& m, const TangentVector& n) {
  const Vec3& p = n.base.coords();
  double nn = metric_norm(m, p, n.components);
  if (std::abs(nn - 1.0) > 1e-10)
    throw PreconditionError("non_unit_vector", "|n| = 1", "curvature endomorphism requires a unit normal");
  Vec3 a, b;
  complete_frame(n.components.normalized(), a, b);
  double s = std::exp(-m.log_factor(p));
  CurvatureEndomorphism out;
  out.e1 = s * a;
  out.e2 = s * b;
  out.w = curvature_in_frame(m, p, n.components, a, b);
  return out;
}

double sectional_curvature(const AmbientModel& m, const ChartPoint& p, const Vec3& a, const Vec3& b) {
  Vec3 e1 = a.normalized();
  Vec3 e2 = b - b.dot(e1) * e1;
  if (e2.norm() < 1e-14 * b.norm() || a.norm() == 0.0)
    throw PreconditionError("degenerate_plane", "independent vectors", "sectional curvature needs a 2-plane");
  e2.normalize();
  ConformalJet j = m.jet(p.coords());
  Mat3 A = schouten(j);
  return -std::exp(-2.0 * j.u) * (e1.dot(A * e1) + e2.dot(A * e2));
}

double max_sectional_curvature(const AmbientModel& m, const Vec3& p) {
  ConformalJet j = m.jet(p);
  Eigen::SelfAdjointEigenSolver<Mat3> es(schouten(j), Eigen::EigenvaluesOnly);
  Vec3 ev = es.eigenvalues();
  return -std::exp(-2.0 * j.u) * (ev[0] + ev[1]);
}

GeodesicState geodesic_flow(const AmbientModel& m, const Vec3& p, const Vec3& v, double t) {
  require_chart_point(p);
  if (m.closed_form()) return hyperbolic_flow(p, v, t);
  return numeric_flow(m, p, v, t);
}

ChartPoint exp_map(const AmbientModel& m, const TangentVector& v, double t) {
  return ChartPoint(geodesic_flow(m, v.base.coords(), v.components, t).position);
}

Vec3 log_vector(const AmbientModel& m, const Vec3& p, const Vec3& q) {
  require_chart_point(p);
  require_chart_point(q);
  if (m.closed_form()) return hyperbolic_log(p, q);
  return numeric_log(m, p, q);
}

TangentVector log_map(const AmbientModel& m, const ChartPoint& p, const ChartPoint& q) {
  return TangentVector{p, log_vector(m, p.coords(), q.coords())};
}

double distance(const AmbientModel& m, const Vec3& p, const Vec3& q) {
  require_chart_point(p);
  require_chart_point(q);
  if (m.closed_form()) return hyperbolic_distance(p, q);
  return metric_norm(m, p, numeric_log(m, p, q));
}

double distance(const AmbientModel& m, const ChartPoint& p, const ChartPoint& q) {
  return distance(m, p.coords(), q.coords());
}

double busemann(const AmbientModel& m, const ChartPoint& p, const IdealPoint& xi, const ChartPoint& basepoint,
                double* ray_length) {
  const Vec3& x = p.coords();
  const Vec3& b = basepoint.coords();
  if (m.closed_form()) {
    if (ray_length) *ray_length = std::numeric_limits<double>::infinity();
    if (xi.is_infinity()) return -std::log(x.z() / b.z());
    Vec3 e(xi.plane_point().x(), xi.plane_point().y(), 0.0);
    return -std::log(x.z() / (x - e).squaredNorm()) + std::log(b.z() / (b - e).squaredNorm());
  }
  Vec3 dir = metric_normalize(m, b, ray_direction(b, xi));
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double T = 2.0; T <= 64.0; T *= 2.0) {
    Vec3 g = geodesic_flow(m, b, dir, T).position;
    double val = distance(m, x, g) - T;
    if (std::isfinite(prev) && std::abs(val - prev) < 1e-6) {
      if (ray_length) *ray_length = T;
      return val;
    }
    prev = val;
  }
  throw SolverError("busemann_truncation", "ray-limit Busemann approximation did not settle below 1e-6");
}

ModelSurfaceCurvatures model_surface_curvatures(const AmbientModel& m, const ModelFamily& f) {
  if (!m.closed_form())
    throw PreconditionError("model_not_hyperbolic", "constant curvature -1", "closed forms need the hyperbolic model");
  double r = f.r;
  if (f.kind != ModelFamilyKind::Horosphere && !(r > 0.0))
    throw PreconditionError("invalid_radius", "r > 0", "model surface radius must be positive");
  ModelSurfaceCurvatures c;
  switch (f.kind) {
    case ModelFamilyKind::Sphere:
      c.lambda1 = c.lambda2 = 1.0 / std::tanh(r);
      break;
    case ModelFamilyKind::Horosphere:
      c.lambda1 = c.lambda2 = 1.0;
      break;
    case ModelFamilyKind::EquidistantToPlane:
      c.lambda1 = c.lambda2 = std::tanh(r);
      break;
    case ModelFamilyKind::TubeAroundGeodesic:
      c.lambda1 = std::tanh(r);
      c.lambda2 = 1.0 / std::tanh(r);
      c.kappa = 1.0;
      return c;
  }
  c.kappa = c.lambda1 * c.lambda2;
  return c;
}

}  // namespace ksurf
