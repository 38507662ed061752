#include "ksurf/parametrized.hpp"

#include <cmath>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

double SmoothField::operator()(const Vec2& xi) const {
  double s = 0.0;
  for (const auto& m : modes) s += m.amplitude * std::cos(m.k.dot(xi) + m.phase);
  return s;
}

SmoothField SmoothField::random(std::mt19937_64& rng, int n_modes, double amplitude, double max_wavenumber) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  SmoothField f;
  for (int i = 0; i < n_modes; ++i) {
    Mode m;
    double r = max_wavenumber * std::sqrt(0.5 * (u(rng) + 1.0));
    double a = ph(rng);
    m.k = Vec2(r * std::cos(a), r * std::sin(a));
    m.amplitude = amplitude * u(rng) / std::sqrt(double(n_modes));
    m.phase = ph(rng);
    f.modes.push_back(m);
  }
  return f;
}

Vec3 SurfacePatch::normal(const Vec2& xi) const {
  const double h = 1e-5;
  Vec3 da = (position(xi + Vec2(h, 0)) - position(xi - Vec2(h, 0))) / (2 * h);
  Vec3 db = (position(xi + Vec2(0, h)) - position(xi - Vec2(0, h))) / (2 * h);
  Vec3 n = da.cross(db);
  if (!(n.norm() > 0.0)) throw SolverError("degenerate_parametrization", "parametrization is singular");
  return metric_normalize(model_, position(xi), n);
}

SphereCapPatch::SphereCapPatch(AmbientModel model, Vec3 center, double radius, double cap_angle, Vec3 axis,
                               SmoothField perturbation)
    : SurfacePatch(std::move(model)), center_(center), radius_(radius), cap_angle_(cap_angle),
      pert_(std::move(perturbation)) {
  require_chart_point(center);
  if (!(radius > 0.0) || !(cap_angle > 0.0) || cap_angle >= M_PI)
    throw PreconditionError("invalid_sphere_cap", "r > 0 and 0 < cap angle < pi", "invalid sphere cap parameters");
  n_ = axis.normalized();
  Vec3 seed = std::abs(n_.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1_ = (seed - seed.dot(n_) * n_).normalized();
  e2_ = n_.cross(e1_);
}

Vec3 SphereCapPatch::direction(const Vec2& xi) const {
  double rho = xi.norm();
  double a = cap_angle_ * rho;
  Vec3 d = std::cos(a) * n_ + cap_angle_ * sinc(a) * (xi.x() * e1_ + xi.y() * e2_);
  return std::exp(-model_.log_factor(center_)) * d;
}

Vec3 SphereCapPatch::position(const Vec2& xi) const {
  double R = radius_ * (1.0 + pert_(xi));
  return geodesic_flow(model_, center_, R * direction(xi), 1.0).position;
}

Vec3 SphereCapPatch::normal(const Vec2& xi) const {
  if (!pert_.zero()) return SurfacePatch::normal(xi);
  GeodesicState s = geodesic_flow(model_, center_, radius_ * direction(xi), 1.0);
  return metric_normalize(model_, s.position, s.velocity);
}

HorospherePatch::HorospherePatch(double height, double size, Vec2 offset)
    : SurfacePatch(AmbientModel::hyperbolic()), height_(height), size_(size), offset_(offset) {
  if (!(height > 0.0) || !(size > 0.0))
    throw PreconditionError("invalid_horosphere", "height > 0", "invalid horosphere patch");
}

Vec3 HorospherePatch::position(const Vec2& xi) const {
  return Vec3(offset_.x() + size_ * height_ * xi.x(), offset_.y() - size_ * height_ * xi.y(), height_);
}

Vec3 HorospherePatch::normal(const Vec2&) const { return Vec3(0, 0, -height_); }

EquidistantPatch::EquidistantPatch(AmbientModel model, double r, double size, SmoothField perturbation)
    : SurfacePatch(std::move(model)), r_(r), size_(size), pert_(std::move(perturbation)) {
  if (!(r >= 0.0) || !(size > 0.0))
    throw PreconditionError("invalid_equidistant", "r >= 0", "invalid equidistant patch");
}

Vec3 EquidistantPatch::plane_point(const Vec2& xi) const {
  return geodesic_flow(model_, Vec3(0, 0, 1), Vec3(size_ * xi.x(), size_ * xi.y(), 0.0), 1.0).position;
}

Vec3 EquidistantPatch::position(const Vec2& xi) const {
  Vec3 q = plane_point(xi);
  double r = r_ * (1.0 + pert_(xi));
  return geodesic_flow(model_, q, r * metric_normalize(model_, q, q), 1.0).position;
}

Vec3 EquidistantPatch::normal(const Vec2& xi) const {
  if (!pert_.zero()) return SurfacePatch::normal(xi);
  Vec3 q = plane_point(xi);
  GeodesicState s = geodesic_flow(model_, q, r_ * metric_normalize(model_, q, q), 1.0);
  if (r_ == 0.0) return metric_normalize(model_, q, q);
  return metric_normalize(model_, s.position, s.velocity);
}

TubePatch::TubePatch(double r, double size) : SurfacePatch(AmbientModel::hyperbolic()), r_(r), size_(size) {
  if (!(r > 0.0) || !(size > 0.0)) throw PreconditionError("invalid_tube", "r > 0", "invalid tube patch");
}

Vec3 TubePatch::position(const Vec2& xi) const {
  double phi = size_ * xi.x() / std::sinh(r_);
  double z = std::exp(size_ * xi.y() / std::cosh(r_));
  return Vec3(z * std::sinh(r_) * std::cos(phi), z * std::sinh(r_) * std::sin(phi), z);
}

Vec3 TubePatch::normal(const Vec2& xi) const {
  double phi = size_ * xi.x() / std::sinh(r_);
  Vec3 p = position(xi);
  Vec3 n(std::cos(phi), std::sin(phi), -std::sinh(r_));
  return p.z() * n / std::cosh(r_);
}

TransformedPatch::TransformedPatch(std::shared_ptr<const SurfacePatch> inner, Isometry g)
    : SurfacePatch(inner->model()), inner_(std::move(inner)), g_(g) {
  if (!model_.closed_form())
    throw PreconditionError("model_not_hyperbolic", "constant curvature -1", "isometries need the hyperbolic model");
}

Vec3 TransformedPatch::position(const Vec2& xi) const { return g_.apply(inner_->position(xi)); }

Vec3 TransformedPatch::normal(const Vec2& xi) const {
  Vec3 p = inner_->position(xi);
  Vec3 n = g_.push_vector(model_, p, inner_->normal(xi));
  return metric_normalize(model_, g_.apply(p), n);
}

ImmersedSurface transform_surface(const AmbientModel& model, const ImmersedSurface& surf, const Isometry& g) {
  const int n = surf.num_vertices();
  std::vector<Vec3> pos(n), nor(n);
  for (int v = 0; v < n; ++v) {
    const Vec3& p = surf.positions()[v];
    pos[v] = g.apply(p);
    nor[v] = g.push_vector(model, p, surf.normals()[v]);
  }
  ImmersedSurface out(surf.mesh_ptr(), pos, nor);
  if (surf.has_forms()) {
    std::vector<VertexForms> forms = surf.forms();
    for (int v = 0; v < n; ++v) {
      forms[v].e1 = g.push_vector(model, surf.positions()[v], forms[v].e1);
      forms[v].e2 = g.push_vector(model, surf.positions()[v], forms[v].e2);
    }
    out.set_forms(std::move(forms), nor, surf.fit_options());
  }
  return out;
}

ImmersedSurface sample_patch(const SurfacePatch& patch, std::shared_ptr<const DiskMesh> mesh, double t) {
  const int n = mesh->num_vertices();
  std::vector<Vec3> pos(n), nor(n);
  for (int v = 0; v < n; ++v) {
    Vec2 xi = t * mesh->reference()[v];
    pos[v] = patch.position(xi);
    nor[v] = patch.normal(xi);
  }
  return ImmersedSurface(std::move(mesh), std::move(pos), std::move(nor));
}

}  // namespace ksurf
