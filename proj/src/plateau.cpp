#include "ksurf/plateau.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "ksurf/errors.hpp"
#include "ksurf/hyperboloid.hpp"

namespace ksurf {

bool IdealDiskData::round() const {
  for (const auto& t : perturbation)
    if (t.cos_coeff != 0.0 || t.sin_coeff != 0.0) return false;
  return true;
}

double IdealDiskData::perturbation_at(double theta) const {
  double p = 0.0;
  for (const auto& t : perturbation) p += t.cos_coeff * std::cos(t.m * theta) + t.sin_coeff * std::sin(t.m * theta);
  return p;
}

double IdealDiskData::perturbation_derivative(double theta) const {
  double p = 0.0;
  for (const auto& t : perturbation)
    p += t.m * (-t.cos_coeff * std::sin(t.m * theta) + t.sin_coeff * std::cos(t.m * theta));
  return p;
}

double IdealDiskData::amplitude() const {
  double a = 0.0;
  for (const auto& t : perturbation) a += std::abs(t.cos_coeff) + std::abs(t.sin_coeff);
  return a;
}

Vec2 IdealDiskData::canonical_point(double theta) const {
  return std::exp(perturbation_at(theta)) * Vec2(std::cos(theta), std::sin(theta));
}

Isometry IdealDiskData::frame() const {
  Isometry g = Isometry::dilation(std::tan(alpha / 2.0));
  if (!gauss_image_inside) g = g.compose(Isometry::swap_zero_infinity());
  return placement.compose(g);
}

IdealPoint IdealDiskData::boundary_point(double theta) const {
  Vec2 w = canonical_point(theta);
  return frame().apply(IdealPoint::on_plane(w.x(), w.y()));
}

void IdealDiskData::validate() const {
  if (!(alpha > 0.0 && alpha < M_PI))
    throw PreconditionError("alpha_out_of_range", "0 < alpha < pi", "ideal circle angular radius out of range");
  for (const auto& t : perturbation)
    if (t.m < 1 || !std::isfinite(t.cos_coeff) || !std::isfinite(t.sin_coeff))
      throw PreconditionError("invalid_perturbation", "Fourier modes m >= 1 with finite coefficients",
                              "invalid perturbation term");
  if (amplitude() > 0.25)
    throw PreconditionError("perturbation_too_large", "sum of |coefficients| <= 0.25",
                            "perturbation amplitude " + std::to_string(amplitude()) + " exceeds 0.25");
}

std::string to_string(GlobalDataKind k) {
  switch (k) {
    case GlobalDataKind::FullSphere:
      return "full_sphere";
    case GlobalDataKind::SphereMinusOne:
      return "sphere_minus_1";
    case GlobalDataKind::SphereMinusTwo:
      return "sphere_minus_2";
  }
  return "unknown";
}

std::optional<GlobalDataKind> parse_global_data_kind(const std::string& s) {
  if (s == "full_sphere") return GlobalDataKind::FullSphere;
  if (s == "sphere_minus_1") return GlobalDataKind::SphereMinusOne;
  if (s == "sphere_minus_2") return GlobalDataKind::SphereMinusTwo;
  return std::nullopt;
}

Refusal reject_global_data(GlobalDataKind kind) {
  Refusal r;
  r.kind = kind;
  r.punctures = kind == GlobalDataKind::FullSphere ? 0 : kind == GlobalDataKind::SphereMinusOne ? 1 : 2;
  r.code = "global_data_refused";
  r.citation = "nonexistence_sphere_minus_at_most_two_points";
  r.message = "ideal data " + to_string(kind) + " (sphere minus " + std::to_string(r.punctures) +
              " points) admits no k-surface solution";
  return r;
}

void throw_refusal(const Refusal& r) { throw PreconditionError(r.code, r.citation, r.message); }

double radial_remap(double rho, double radius) {
  const double delta = radius - 0.5;
  const double s0 = delta > 0.0 ? 0.5 / delta : 0.0;
  if (!(s0 > 0.0 && s0 <= 3.0)) return rho * radius;
  if (rho <= 0.5) return rho;
  const double u = (rho - 0.5) / 0.5;
  const double s1 = std::min(s0, 1.0);
  const double h = (u * u * u - 2 * u * u + u) * s0 + (-2 * u * u * u + 3 * u * u) + (u * u * u - u * u) * s1;
  return 0.5 + delta * h;
}

std::vector<SupportingDisk> supporting_disks(const IdealDiskData& data, const BarrierOptions& opts) {
  data.validate();
  if (data.round()) return {SupportingDisk{Vec2::Zero(), 1.0}};
  const int nc = std::max(opts.curve_samples, 64);
  std::vector<Vec2> curve(nc);
  for (int k = 0; k < nc; ++k) curve[k] = data.canonical_point(2.0 * M_PI * k / nc);
  auto dist_to_curve = [&](const Vec2& c) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& w : curve) d = std::min(d, (w - c).norm());
    return d;
  };
  std::vector<SupportingDisk> disks;
  const int nb = std::max(opts.boundary_disks, 16);
  for (int j = 0; j < nb; ++j) {
    double th = 2.0 * M_PI * j / nb;
    Vec2 w = data.canonical_point(th);
    double e = std::exp(data.perturbation_at(th));
    Vec2 tangent = e * (data.perturbation_derivative(th) * Vec2(std::cos(th), std::sin(th)) +
                        Vec2(-std::sin(th), std::cos(th)));
    Vec2 n = Vec2(-tangent.y(), tangent.x()).normalized();
    double R = std::numeric_limits<double>::infinity();
    for (const auto& q : curve) {
      Vec2 d = q - w;
      double dn = d.dot(n);
      if (dn > 1e-15) R = std::min(R, d.squaredNorm() / (2.0 * dn));
    }
    if (!std::isfinite(R)) continue;
    R *= 1.0 - 1e-9;
    disks.push_back({w + R * n, R});
  }
  // Interior centers keep the envelope defined deep inside the disk.
  disks.push_back({Vec2::Zero(), (1.0 - 1e-6) * dist_to_curve(Vec2::Zero())});
  for (int i = 1; i <= 8; ++i) {
    double rc = 0.9 * i / 8.0;
    int na = 6 * i;
    for (int l = 0; l < na; ++l) {
      double ph = 2.0 * M_PI * l / na;
      Vec2 c = rc * std::exp(data.perturbation_at(ph)) * Vec2(std::cos(ph), std::sin(ph));
      disks.push_back({c, (1.0 - 1e-6) * dist_to_curve(c)});
    }
  }
  return disks;
}

BarrierPatch::BarrierPatch(const IdealDiskData& data, std::vector<SupportingDisk> disks, double epsilon, double radius)
    : SurfacePatch(AmbientModel::hyperbolic()),
      data_(data),
      frame_(data.frame()),
      disks_(std::move(disks)),
      epsilon_(epsilon),
      radius_(radius) {
  if (!(radius > 0.0 && radius < 1.0))
    throw PreconditionError("invalid_exhaustion_radius", "0 < r < 1", "exhaustion radius out of range");
  if (!(epsilon > 0.0)) throw PreconditionError("invalid_pushoff", "epsilon > 0", "pushoff distance must be positive");
  if (disks_.empty()) throw PreconditionError("no_supporting_disks", "nonempty envelope", "no supporting disks");
}

Vec2 BarrierPatch::gauss_image(const Vec2& xi) const {
  // Reflected angle keeps d/da x d/db along the outward normal.
  double rho = xi.norm();
  double th = std::atan2(-xi.y(), xi.x());
  return radial_remap(std::min(rho, 1.0), radius_) * data_.canonical_point(th);
}

GeodesicState BarrierPatch::canonical(const Vec2& xi) const {
  const Vec2 w = gauss_image(xi);
  const double S = std::sinh(epsilon_);
  double best = -std::numeric_limits<double>::infinity();
  SupportingDisk active;
  auto consider = [&](const SupportingDisk& d) {
    double d2 = (w - d.center).squaredNorm();
    if (!(d2 < d.radius * d.radius)) return;
    double R = d.radius;
    double h = -R * S + std::sqrt(R * R * S * S + R * R - d2);
    if (h > best) {
      best = h;
      active = d;
    }
  };
  for (const auto& d : disks_) consider(d);
  if (!std::isfinite(best)) {
    // Thin slivers along the curve missed by the sampled disks.
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2048; ++k) dmin = std::min(dmin, (data_.canonical_point(2.0 * M_PI * k / 2048) - w).norm());
    consider({w, dmin});
  }
  if (!std::isfinite(best))
    throw SolverError("barrier_undefined", "Gauss image point outside every supporting disk");
  Vec3 x(w.x(), w.y(), best);
  // Equidistant of the active plane: Euclidean sphere centered at (c, -R S).
  Vec3 center(active.center.x(), active.center.y(), -active.radius * S);
  Vec3 n = (center - x).normalized() * x.z();
  return {x, n};
}

Vec3 BarrierPatch::position(const Vec2& xi) const { return frame_.apply(canonical(xi).position); }

Vec3 BarrierPatch::normal(const Vec2& xi) const {
  GeodesicState s = canonical(xi);
  Vec3 p = frame_.apply(s.position);
  return metric_normalize(model_, p, frame_.push_vector(model_, s.position, s.velocity));
}

namespace {

void require_hyperbolic(const AmbientModel& model) {
  if (!model.closed_form())
    throw PreconditionError("model_not_hyperbolic", "hyperbolic half-space model",
                            "ideal boundary constructions need the hyperbolic model");
}

void require_k(const AmbientModel& model, double k) {
  const double c = model.curvature_upper_bound();
  if (!(k > 0.0 && k < c))
    throw PreconditionError("k_outside_interval", "0 < k < c",
                            "target curvature " + std::to_string(k) + " is outside (0, " + std::to_string(c) + ")");
}

struct Certified {
  ImmersedSurface surface;
  double min_kappa;
  bool ok;
};

Certified build_barrier(const AmbientModel& model, const std::shared_ptr<const BarrierPatch>& patch,
                        const std::shared_ptr<const DiskMesh>& mesh, const FitOptions& fit, double k) {
  ImmersedSurface s = fit_fundamental_forms(model, sample_patch(*patch, mesh), fit);
  double kmin = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int v = 0; v < s.num_vertices(); ++v) {
    if (mesh->is_boundary(v)) continue;
    const auto& f = s.forms()[v];
    kmin = std::min(kmin, f.kappa);
    if (!(f.kappa > k + 1e-3) || !(f.principal[0] > 0.0)) ok = false;
  }
  return {std::move(s), kmin, ok};
}

double limit_distance(double k, const AmbientModel& model) { return std::atanh(std::sqrt(k / model.curvature_upper_bound())); }

}  // namespace

BarrierSurface barrier_surface(const AmbientModel& model, const IdealDiskData& data, double k, const BarrierOptions& opts) {
  require_hyperbolic(model);
  require_k(model, k);
  data.validate();
  auto disks = supporting_disks(data, opts);
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, opts.refinement));
  double margin = opts.margin;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt, margin *= 2.0) {
    double eps = limit_distance(k, model) + margin;
    auto patch = std::make_shared<const BarrierPatch>(data, disks, eps, opts.radius);
    Certified c = build_barrier(model, patch, mesh, opts.fit, k);
    if (c.ok)
      return BarrierSurface{std::move(c.surface), patch, eps, c.min_kappa, attempt, static_cast<int>(disks.size())};
  }
  throw SolverError("barrier_certification_failed",
                    "barrier kappa > k not certified after " + std::to_string(opts.max_retries) + " pushoff increases");
}

double round_limit_distance(const IdealDiskData& data, const Vec3& p) {
  Vec3 q = data.frame().inverse().apply(p);
  return std::asinh((1.0 - q.squaredNorm()) / (2.0 * q.z()));
}

namespace {

// Stages solved in the frame without the placement isometry.
ExhaustionResult exhaustion_stages(const AmbientModel& model, const IdealDiskData& data, double k,
                                   const ExhaustionConfig& cfg) {
  if (cfg.first_stage < 2 || cfg.max_stages < 1 || !(cfg.tol > 0.0))
    throw PreconditionError("invalid_exhaustion_config", "first_stage >= 2, max_stages >= 1, tol > 0",
                            "invalid exhaustion configuration");
  ExhaustionResult out;
  ExhaustionReport& rep = out.report;
  Alpha0Measurement a0 = measure_alpha0(model, k);
  rep.alpha0 = a0.alpha0;
  rep.delta_bound = cone_barrier_delta(model, std::min(a0.alpha0, M_PI / 2), 0.0, k, 16).delta;

  BarrierOptions bopts = cfg.barrier;
  bopts.refinement = cfg.refinement;
  auto disks = supporting_disks(data, bopts);
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, cfg.refinement));
  for (int v : mesh->interior_vertices())
    if (mesh->reference()[v].norm() <= cfg.probe_radius + 1e-12) rep.probe_vertices.push_back(v);

  std::vector<double> prev_lambda, prev_seed, prev_probe;
  for (int s = 0; s < cfg.max_stages; ++s) {
    const int j = cfg.first_stage + s;
    const double r = 1.0 - std::ldexp(1.0, -j);
    std::shared_ptr<const BarrierPatch> patch;
    ImmersedSurface base = [&]() {
      if (s == 0) {
        bopts.radius = r;
        BarrierSurface b = barrier_surface(model, data, k, bopts);
        rep.epsilon = b.epsilon;
        patch = b.patch;
        return b.surface;
      }
      patch = std::make_shared<const BarrierPatch>(data, disks, rep.epsilon, r);
      Certified c = build_barrier(model, patch, mesh, bopts.fit, k);
      if (!c.ok)
        throw SolverError("barrier_certification_failed",
                          "barrier kappa > k fails at exhaustion radius " + std::to_string(r));
      return c.surface;
    }();
    LensProblem prob{.model = model, .base = base, .k_target = k, .margin = 1e-3, .barrier_base = true, .patch = patch};
    std::vector<double> seed_lambda = spanning_equidistant_seed(model, prob.base, k).lambda;
    std::vector<std::vector<double>> guesses;
    guesses.push_back(seed_lambda);
    if (s > 0) {
      for (int v : mesh->interior_vertices()) guesses[0][v] = seed_lambda[v] + prev_lambda[v] - prev_seed[v];
      guesses.push_back(prev_lambda);
    }
    // The barrier itself is elliptic: k < kappa < c.
    guesses.emplace_back(mesh->num_vertices(), 0.0);
    std::optional<SolveResult> sol;
    for (const auto& guess : guesses) {
      try {
        sol = newton_solve(prob, make_radial_graph(prob.base, guess, GraphOrientation::Inward), cfg.solver);
        break;
      } catch (const KsurfError& e) {
        if (e.error_class() != ErrorClass::Solver && e.code() != "seed_not_elliptic") throw;
      }
    }
    if (!sol) {
      sol = homotopy_solve(prob, HomotopySchedule::k_ramp(0.5 * k, k, 4), cfg.solver);
      if (!sol->report.converged) {
        rep.failure = sol->report.failure;
        rep.failure_message = "exhaustion stage " + std::to_string(j) + ": " + sol->report.failure_message;
        out.lens = std::move(sol);
        return out;
      }
    }
    ExhaustionStage st;
    st.index = j;
    st.radius = r;
    st.iterations = sol->report.iterations;
    st.residual = sol->report.residual_final;
    st.certificate = sol->report.certificate;
    std::vector<double> probe;
    for (int v : rep.probe_vertices) probe.push_back(sol->graph.lambda[v]);
    for (double f : probe) rep.max_height = std::max(rep.max_height, f);
    bool done = false;
    if (s > 0) {
      st.probe_change = 0.0;
      st.min_increment = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < probe.size(); ++i) {
        double d = probe[i] - prev_probe[i];
        st.probe_change = std::max(st.probe_change, std::abs(d));
        st.min_increment = std::min(st.min_increment, d);
      }
      if (st.min_increment < -cfg.monotonicity_tol) rep.monotone = false;
      done = st.probe_change < cfg.tol;
    }
    rep.stages.push_back(st);
    rep.trace.push_back(probe);
    prev_lambda = sol->graph.lambda;
    prev_seed = std::move(seed_lambda);
    prev_probe = std::move(probe);
    out.lens = std::move(sol);
    if (!rep.monotone) {
      rep.failure = "monotonicity_violated";
      rep.failure_message = "probe height decreased by " + std::to_string(-st.min_increment) + " at stage " +
                            std::to_string(j);
      return out;
    }
    if (done) {
      rep.converged = true;
      break;
    }
  }
  rep.bounded = rep.max_height <= rep.delta_bound + 1e-6;
  if (!rep.converged) {
    rep.failure = "max_stages";
    rep.failure_message = "probe heights still moving after " + std::to_string(cfg.max_stages) + " stages";
  }
  return out;
}

}  // namespace

ExhaustionResult exhaustion_solve(const AmbientModel& model, const IdealDiskData& data, double k,
                                  const ExhaustionConfig& cfg) {
  require_hyperbolic(model);
  require_k(model, k);
  data.validate();
  IdealDiskData local = data;
  local.placement = Isometry();
  ExhaustionResult out = exhaustion_stages(model, local, k, cfg);
  ExhaustionReport& rep = out.report;
  if (out.lens) {
    out.lens->graph.base = transform_surface(model, out.lens->graph.base, data.placement);
    out.lens->surface = transform_surface(model, out.lens->surface, data.placement);
  }
  if (data.round() && out.lens) {
    const double rk = limit_distance(k, model);
    const ImmersedSurface& surf = out.lens->surface;
    double perr = 0.0;
    for (int v : rep.probe_vertices) perr = std::max(perr, std::abs(round_limit_distance(data, surf.positions()[v]) - rk));
    rep.closed_form_error = perr;
    // Independent geodesic-normal refits on the probe region only; rim
    // vertices are too far apart hyperbolically for that fit.
    FitOptions gn;
    gn.method = FitMethod::GeodesicNormal;
    VertexFitter fitter(model, surf.mesh_ptr(), gn);
    const ImmersedSurface& base = out.lens->graph.base;
    std::vector<Vec3> pos(base.num_vertices()), nor(base.num_vertices());
    for (int v = 0; v < base.num_vertices(); ++v) {
      GeodesicState g = geodesic_flow(model, base.positions()[v], -(rep.epsilon - rk) * base.normals()[v], 1.0);
      pos[v] = g.position;
      nor[v] = -metric_normalize(model, g.position, g.velocity);
    }
    double es = 0.0, eo = 0.0;
    for (int v : rep.probe_vertices) {
      Vec3 n1 = surf.normals()[v], n2 = nor[v];
      es = std::max(es, std::abs(fitter.fit(v, surf.positions(), n1).kappa - k));
      eo = std::max(eo, std::abs(fitter.fit(v, pos, n2).kappa - k));
    }
    rep.solution_kappa_error = es;
    rep.oracle_kappa_error = eo;
  }
  return out;
}

namespace {

// Ideal endpoint of the geodesic ray from p with direction v.
IdealPoint ray_endpoint(const Vec3& p, const Vec3& v) {
  Vec3 w = v.normalized();
  Vec2 wh(w.x(), w.y());
  double n2 = wh.squaredNorm();
  if (w.z() > 0.0 && n2 < 1e-28) return IdealPoint::infinity();
  double scale = w.z() > 0.0 ? (1.0 + w.z()) / n2 : 1.0 / (1.0 - w.z());
  Vec2 e = Vec2(p.x(), p.y()) + p.z() * scale * wh;
  return IdealPoint::on_plane(e.x(), e.y());
}

struct Cone {
  Vec3 apex;
  Vec3 u, e1, e2;  // metric-orthonormal at apex
  HyperbolicPlane plane;  // spanned by the ideal circle, positive toward the disk

  Vec3 direction(double theta, double phi) const {
    return std::cos(theta) * u + std::sin(theta) * (std::cos(phi) * e1 + std::sin(phi) * e2);
  }
};

Cone make_cone(const AmbientModel& model, const Vec3& apex, const Vec3& axis, double alpha) {
  Cone c;
  c.apex = apex;
  c.u = metric_normalize(model, apex, axis);
  Vec3 t = std::abs(c.u.normalized().x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 a = t - metric_inner(model, apex, t, c.u) / metric_inner(model, apex, c.u, c.u) * c.u;
  c.e1 = metric_normalize(model, apex, a);
  c.e2 = metric_normalize(model, apex, c.u.cross(c.e1));
  IdealPoint pts[3];
  for (int i = 0; i < 3; ++i) pts[i] = ray_endpoint(apex, c.direction(alpha, 2.0 * M_PI * i / 3.0));
  c.plane = plane_through_ideal(pts[0], pts[1], pts[2]);
  // The axis ends inside the ideal disk.
  if (c.plane.signed_distance(geodesic_flow(model, apex, c.u, 20.0).position) < 0.0) c.plane = c.plane.flipped();
  return c;
}

// Distance along the ray at which the equidistant {signed distance = r} is met.
double hit_distance(const AmbientModel& model, const Cone& c, const Vec3& dir, double r) {
  auto g = [&](double t) { return c.plane.signed_distance(geodesic_flow(model, c.apex, dir, t).position) - r; };
  double lo = 0.0, hi = 1.0;
  if (g(lo) >= 0.0) return 0.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 200.0) return std::numeric_limits<double>::infinity();
  }
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
  auto br = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
  return 0.5 * (br.first + br.second);
}

}  // namespace

ConeBarrierEstimate cone_barrier_delta(const AmbientModel& model, double alpha, double beta, double k, int samples,
                                       std::uint64_t seed) {
  require_hyperbolic(model);
  require_k(model, k);
  if (alpha == beta) throw PreconditionError("degenerate_cone", "beta < alpha", "degenerate cone: alpha equals beta");
  if (!(beta >= 0.0 && beta < alpha && alpha <= M_PI / 2))
    throw PreconditionError("cone_angle_out_of_range", "0 <= beta < alpha <= pi/2", "cone angles out of range");
  if (samples < 1) throw PreconditionError("invalid_samples", "samples >= 1", "need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const double r = limit_distance(k, model);
  std::vector<double> hits;
  for (int i = 0; i < samples; ++i) {
    Isometry g = Isometry::random(rng, 0.5);
    Vec3 apex = g.apply(Vec3(0, 0, 1));
    Vec3 axis(gauss(rng), gauss(rng), gauss(rng));
    Cone c = make_cone(model, apex, axis, alpha);
    // The first sample is the rim ray, where the supremum sits.
    double theta = i == 0 ? beta : beta * unif(rng);
    double t = hit_distance(model, c, c.direction(theta, 2.0 * M_PI * unif(rng)), r);
    if (!std::isfinite(t)) throw SolverError("cone_sampling_failed", "sample geodesic never meets the solution");
    hits.push_back(t);
  }
  ConeBarrierEstimate est;
  est.samples = samples;
  est.delta = *std::max_element(hits.begin(), hits.end());
  std::vector<double> boot;
  std::uniform_int_distribution<int> pick(0, samples - 1);
  for (int b = 0; b < 200; ++b) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) m = std::max(m, hits[pick(rng)]);
    boot.push_back(m);
  }
  std::sort(boot.begin(), boot.end());
  est.spread = (boot[189] - boot[10]) / est.delta;
  return est;
}

Alpha0Measurement measure_alpha0(const AmbientModel& model, double k, int resolution) {
  require_hyperbolic(model);
  require_k(model, k);
  Alpha0Measurement m;
  m.step = M_PI / (2.0 * resolution);
  const double r = limit_distance(k, model);
  const Vec3 apex(0, 0, 1);
  bool ok_so_far = true;
  for (int i = 1; i < 2 * resolution; ++i) {
    double alpha = i * m.step;
    Cone c = make_cone(model, apex, Vec3(0.3, -0.2, -1.0), alpha);
    // Apex in the closed hull of the complementary disk.
    bool pass = c.plane.signed_distance(apex) <= 1e-12;
    // Points of the asymptotic solution stay inside the cone.
    Vec4 m4 = c.plane.m;
    Vec4 foot = to_hyperboloid(c.plane.project(apex));
    Vec4 basis[2];
    int nb = 0;
    for (int e = 0; e < 4 && nb < 2; ++e) {
      Vec4 v = Vec4::Unit(e);
      v += minkowski(v, foot) * foot - minkowski(v, m4) * m4;
      for (int q = 0; q < nb; ++q) v -= minkowski(v, basis[q]) * basis[q];
      double n2 = minkowski(v, v);
      if (n2 > 1e-6) basis[nb++] = v / std::sqrt(n2);
    }
    for (double s : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0})
      for (int l = 0; l < 12 && pass; ++l) {
        double ph = 2.0 * M_PI * l / 12.0;
        Vec4 y = std::cosh(s) * foot + std::sinh(s) * (std::cos(ph) * basis[0] + std::sin(ph) * basis[1]);
        Vec3 x = from_hyperboloid(std::cosh(r) * y + std::sinh(r) * m4);
        Vec3 lv = log_vector(model, apex, x);
        double cosang = metric_inner(model, apex, lv, c.u) / metric_norm(model, apex, lv);
        if (std::acos(std::clamp(cosang, -1.0, 1.0)) > alpha + 1e-9) pass = false;
      }
    m.tested.push_back(alpha);
    m.passed.push_back(pass);
    if (pass && ok_so_far) m.alpha0 = alpha;
    if (!pass) ok_so_far = false;
  }
  return m;
}

}  // namespace ksurf
