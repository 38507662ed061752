#include "ksurf/continuation.hpp"

#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "ksurf/errors.hpp"

namespace ksurf {

void validate_problem(const LensProblem& p) {
  const DiskMesh& mesh = p.base.mesh();
  if (mesh.boundary_loop().empty() || mesh.topology().boundary_loops == 0)
    throw PreconditionError("closed_surface_refused", "base surface has nonempty boundary",
                            "closed convex surfaces bound no lens k-surface; the problem has no solution");
  const double c = p.model.curvature_upper_bound();
  if (!(p.k_target > 0.0 && p.k_target < c))
    throw PreconditionError("k_outside_interval", "0 < k < c",
                            "target curvature " + std::to_string(p.k_target) + " is outside (0, " + std::to_string(c) + ")");
  if (!mesh.topology().is_disk())
    throw PreconditionError("base_not_disk", "base is a topological disk", "lens problems need a disk base");
  if (!(p.margin > 0.0)) throw PreconditionError("invalid_margin", "margin > 0", "margin must be positive");
  const auto& forms = p.base.forms();
  const double bound = p.barrier_base ? p.k_target : c;
  std::vector<int> bad;
  for (int v = 0; v < p.base.num_vertices(); ++v) {
    // Barrier rims carry one-sided fits and Dirichlet rows; they are not checked.
    if (p.barrier_base && mesh.is_boundary(v)) continue;
    if (!(forms[v].kappa > bound + p.margin) || !(forms[v].principal[0] > 0.0)) bad.push_back(v);
  }
  if (!bad.empty())
    throw PreconditionError("base_not_convex",
                            p.barrier_base ? "base kappa > k + margin with positive principal curvatures"
                                           : "base kappa > c + margin with positive principal curvatures",
                            std::to_string(bad.size()) + " base vertices fail the convexity bound", bad);
}

LensProblem make_lens_problem(const AmbientModel& model, std::shared_ptr<const SurfacePatch> patch,
                              std::shared_ptr<const DiskMesh> mesh, double k_target, const FitOptions& fit,
                              double margin) {
  ImmersedSurface base = fit_fundamental_forms(model, sample_patch(*patch, std::move(mesh)), fit);
  return LensProblem{.model = model,
                     .base = std::move(base),
                     .k_target = k_target,
                     .margin = margin,
                     .barrier_base = false,
                     .patch = std::move(patch)};
}

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::ContractingDisk:
      return "contracting_disk";
    case ScheduleKind::KRamp:
      return "k_ramp";
    case ScheduleKind::EquidistantSeed:
      return "equidistant_seed";
  }
  return "unknown";
}

HomotopySchedule HomotopySchedule::contracting_disk(double t0, double k, int n) {
  HomotopySchedule s;
  s.kind = ScheduleKind::ContractingDisk;
  n = std::max(n, 2);
  for (int i = 0; i < n; ++i) s.stages.emplace_back(t0 + (1.0 - t0) * i / (n - 1.0), k);
  s.stages.back().first = 1.0;
  return s;
}

HomotopySchedule HomotopySchedule::k_ramp(double k0, double k1, int n) {
  HomotopySchedule s;
  s.kind = ScheduleKind::KRamp;
  n = std::max(n, 2);
  for (int i = 0; i < n; ++i) s.stages.emplace_back(1.0, k0 + (k1 - k0) * i / (n - 1.0));
  s.stages.back().second = k1;
  return s;
}

HomotopySchedule HomotopySchedule::equidistant_seed(double k) {
  HomotopySchedule s;
  s.kind = ScheduleKind::EquidistantSeed;
  s.stages.emplace_back(1.0, k);
  return s;
}

double equidistant_seed_distance(const AmbientModel& model, double min_principal, double k) {
  const double c = model.curvature_upper_bound();
  const double sc = std::sqrt(c);
  if (min_principal >= std::sqrt(k)) return 0.0;
  double l = std::max(min_principal, 0.0);
  return (std::atanh(std::sqrt(k / c)) - std::atanh(l / sc)) / sc;
}

RadialGraph equidistant_seed(const AmbientModel& model, const ImmersedSurface& base, double k) {
  const auto& forms = base.forms();
  double lmin = std::numeric_limits<double>::infinity();
  for (int v = 0; v < base.num_vertices(); ++v) lmin = std::min(lmin, forms[v].principal[0]);
  double R = equidistant_seed_distance(model, lmin, k);
  std::vector<double> lambda(base.num_vertices(), 0.0);
  for (int v : base.mesh().interior_vertices()) {
    double s = std::clamp((1.0 - base.mesh().reference()[v].norm()) / 0.25, 0.0, 1.0);
    lambda[v] = R * s * s * (3.0 - 2.0 * s);
  }
  return make_radial_graph(base, std::move(lambda), GraphOrientation::Outward);
}

RadialGraph spanning_equidistant_seed(const AmbientModel& model, const ImmersedSurface& base, double k) {
  const DiskMesh& mesh = base.mesh();
  std::vector<Vec3> bpts;
  for (int v : mesh.boundary_loop()) bpts.push_back(base.positions()[v]);
  HyperbolicCircle circle = fit_circle(bpts);
  double side = 0.0;
  for (int v : mesh.interior_vertices()) side += circle.plane.signed_distance(base.positions()[v]);
  if (side < 0.0) circle.plane = circle.plane.flipped();
  const double r = std::atanh(std::sqrt(k / model.curvature_upper_bound()));
  HyperbolicPlane carrier = equidistant_carrier(circle, r);
  std::vector<double> lambda(base.num_vertices(), 0.0);
  for (int v : mesh.interior_vertices()) {
    const Vec3& p = base.positions()[v];
    const Vec3 dir = -base.normals()[v];
    auto g = [&](double t) { return carrier.signed_distance(geodesic_flow(model, p, dir, t).position) - r; };
    if (!(g(0.0) > 0.0)) continue;
    double hi = 0.1;
    while (g(hi) > 0.0) {
      hi *= 2.0;
      if (hi > 50.0) throw SolverError("seed_construction_failed", "inward normal never meets the seed surface");
    }
    boost::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-14; };
    auto br = boost::math::tools::toms748_solve(g, 0.0, hi, tol, iters);
    lambda[v] = 0.5 * (br.first + br.second);
  }
  return make_radial_graph(base, std::move(lambda), GraphOrientation::Inward);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Discrete curvature map lambda -> kappa of the embedded graph, with local
// refits for Jacobian columns.
class GraphEvaluator {
 public:
  GraphEvaluator(const AmbientModel& model, const ImmersedSurface& base, GraphOrientation orient, const FitOptions& fit)
      : model_(model), base_(base), sign_(orient == GraphOrientation::Outward ? 1.0 : -1.0),
        fitter_(model, base.mesh_ptr(), fit) {
    const DiskMesh& mesh = base.mesh();
    interior_ = mesh.interior_vertices();
    row_of_.assign(mesh.num_vertices(), -1);
    for (int i = 0; i < static_cast<int>(interior_.size()); ++i) row_of_[interior_[i]] = i;
  }

  const std::vector<int>& interior() const { return interior_; }
  const std::vector<int>& row_of() const { return row_of_; }

  Vec3 point(int v, double lambda, Vec3* velocity = nullptr) const {
    GeodesicState s = geodesic_flow(model_, base_.positions()[v], sign_ * base_.normals()[v], lambda);
    if (velocity) *velocity = s.velocity;
    return s.position;
  }

  // Full evaluation; updates positions, normals and forms.
  void evaluate(const std::vector<double>& lambda) {
    const int n = base_.num_vertices();
    X_.resize(n);
    N_.resize(n);
    forms_.resize(n);
    for (int v = 0; v < n; ++v) {
      Vec3 vel;
      X_[v] = point(v, lambda[v], &vel);
      N_[v] = sign_ * vel;
    }
    for (int v = 0; v < n; ++v) forms_[v] = fitter_.fit(v, X_, N_[v]);
  }

  const std::vector<VertexForms>& forms() const { return forms_; }
  const std::vector<Vec3>& positions() const { return X_; }
  const std::vector<Vec3>& normals() const { return N_; }

  // Interior kappa of the dependents of v with lambda[v] replaced.
  void perturbed(int v, double lambda_v, std::vector<std::pair<int, double>>& out) {
    Vec3 saved = X_[v];
    X_[v] = point(v, lambda_v);
    out.clear();
    for (int w : fitter_.dependents(v)) {
      if (row_of_[w] < 0) continue;
      Vec3 nu = N_[w];
      out.emplace_back(w, fitter_.fit(w, X_, nu).kappa);
    }
    X_[v] = saved;
  }

 private:
  AmbientModel model_;
  const ImmersedSurface& base_;
  double sign_;
  VertexFitter fitter_;
  std::vector<int> interior_, row_of_;
  std::vector<Vec3> X_, N_;
  std::vector<VertexForms> forms_;
};

struct Trial {
  bool elliptic = true;
  double sup = 0.0;
  Eigen::VectorXd F;
};

Trial residual(const GraphEvaluator& ev, double k, double c, const SolverConfig& cfg) {
  Trial t;
  const auto& in = ev.interior();
  t.F.resize(static_cast<int>(in.size()));
  for (int i = 0; i < static_cast<int>(in.size()); ++i) {
    const auto& f = ev.forms()[in[i]];
    t.F[i] = f.kappa - k;
    t.sup = std::max(t.sup, std::abs(t.F[i]));
    if (!(f.kappa > cfg.kappa_min && f.kappa < c - cfg.kappa_margin && f.principal[0] > 0.0)) t.elliptic = false;
  }
  return t;
}

SpMat jacobian(GraphEvaluator& ev, const std::vector<double>& lambda, double h) {
  const auto& in = ev.interior();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::pair<int, double>> plus, minus;
  for (int col = 0; col < static_cast<int>(in.size()); ++col) {
    int v = in[col];
    ev.perturbed(v, lambda[v] + h, plus);
    ev.perturbed(v, lambda[v] - h, minus);
    for (size_t j = 0; j < plus.size(); ++j)
      trip.emplace_back(ev.row_of()[plus[j].first], col, (plus[j].second - minus[j].second) / (2.0 * h));
  }
  const int n = static_cast<int>(in.size());
  SpMat J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

struct NewtonOutcome {
  std::vector<double> lambda;
  int iterations = 0;
  std::vector<double> history;
  std::vector<double> tangent;  // d lambda / d k at the solution, when requested
};

NewtonOutcome newton_core(const LensProblem& p, const std::vector<double>& seed, const SolverConfig& cfg,
                          bool want_tangent) {
  const double c = p.model.curvature_upper_bound();
  GraphEvaluator ev(p.model, p.base, GraphOrientation::Inward, p.base.fit_options());
  const auto& in = ev.interior();
  NewtonOutcome out;
  out.lambda = seed;
  ev.evaluate(out.lambda);
  Trial cur = residual(ev, p.k_target, c, cfg);
  if (!cur.elliptic)
    throw PreconditionError("seed_not_elliptic", "0 < kappa < c on the seed",
                            "seed surface leaves the ellipticity region");
  out.history.push_back(cur.sup);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  auto factor = [&]() {
    SpMat J = jacobian(ev, out.lambda, cfg.fd_step);
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw SolverError("linear_solver_breakdown", "Jacobian factorization failed");
  };
  while (cur.sup > cfg.tol) {
    if (out.iterations >= cfg.max_iterations)
      throw SolverError("max_iterations", "Newton did not reach tolerance in " + std::to_string(cfg.max_iterations) +
                                              " iterations (residual " + std::to_string(cur.sup) + ")");
    factor();
    Eigen::VectorXd delta = lu.solve(-cur.F);
    double alpha = 1.0;
    bool accepted = false, any_elliptic = false;
    std::vector<double> trial_lambda;
    for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
      trial_lambda = out.lambda;
      for (int i = 0; i < static_cast<int>(in.size()); ++i) trial_lambda[in[i]] += alpha * delta[i];
      ev.evaluate(trial_lambda);
      Trial t = residual(ev, p.k_target, c, cfg);
      if (!t.elliptic) continue;
      any_elliptic = true;
      if (t.sup <= (1.0 - 1e-4 * alpha) * cur.sup) {
        cur = std::move(t);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      ev.evaluate(out.lambda);
      if (!any_elliptic) throw SolverError("ellipticity_lost", "every damped step leaves 0 < kappa < c");
      throw SolverError("line_search_stall", "Armijo backtracking failed at residual " + std::to_string(cur.sup));
    }
    out.lambda = trial_lambda;
    out.iterations++;
    out.history.push_back(cur.sup);
  }
  if (want_tangent) {
    factor();
    Eigen::VectorXd t = lu.solve(Eigen::VectorXd::Ones(static_cast<int>(in.size())));
    out.tangent.assign(out.lambda.size(), 0.0);
    for (int i = 0; i < static_cast<int>(in.size()); ++i) out.tangent[in[i]] = t[i];
  }
  return out;
}

SolveResult finish(const LensProblem& p, NewtonOutcome&& o, const SolverConfig& cfg) {
  SolveResult r{make_radial_graph(p.base, std::move(o.lambda), GraphOrientation::Inward), p.base, {}};
  SolveReport& rep = r.report;
  rep.iterations = o.iterations;
  rep.residual_history = std::move(o.history);
  rep.min_interior_lambda = std::numeric_limits<double>::infinity();
  for (int v : p.base.mesh().interior_vertices()) rep.min_interior_lambda = std::min(rep.min_interior_lambda, r.graph.lambda[v]);
  if (!(rep.min_interior_lambda > 0.0))
    throw SolverError("lens_detached", "solution has non-positive height at an interior vertex");
  r.surface = graph_embed(p.model, r.graph, p.base.fit_options());
  for (int v : p.base.mesh().interior_vertices())
    rep.residual_final = std::max(rep.residual_final, std::abs(r.surface.forms()[v].kappa - p.k_target));
  if (cfg.certify_max_principle) {
    OperatorAssembly a = assemble_certified_L(p.model, r.surface);
    rep.stencil = to_string(a.stencil);
    rep.certificate = to_string(a.certificate.kind);
    if (a.certificate.kind == MaxPrincipleKind::Violated)
      throw SolverError("discrete_maximum_principle_violated",
                        "no stencil of the solved surface satisfies the discrete maximum principle");
  }
  rep.degeneracy = degeneracy_diagnostics(p.model, r.surface);
  rep.mesh_quality = mesh_quality(p.model, r.surface);
  rep.converged = rep.residual_final <= cfg.tol;
  return r;
}

// Barycentric interpolation of a vertex field at a reference-disk point.
double interpolate(const DiskMesh& mesh, const std::vector<double>& f, const Vec2& q) {
  const auto& R = mesh.reference();
  double best = -std::numeric_limits<double>::infinity();
  double val = 0.0;
  for (const auto& t : mesh.triangles()) {
    Vec2 a = R[t[0]], b = R[t[1]], c = R[t[2]];
    Mat2 M;
    M.col(0) = b - a;
    M.col(1) = c - a;
    Vec2 w = M.inverse() * (q - a);
    double w0 = 1.0 - w[0] - w[1];
    double m = std::min({w0, w[0], w[1]});
    if (m > best) {
      best = m;
      val = w0 * f[t[0]] + w[0] * f[t[1]] + w[1] * f[t[2]];
    }
    if (m >= 0.0) return val;
  }
  return val;
}

}  // namespace

SolveResult newton_solve(const LensProblem& problem, const RadialGraph& seed, const SolverConfig& config) {
  validate_problem(problem);
  seed.validate();
  if (seed.orientation != GraphOrientation::Inward)
    throw PreconditionError("seed_orientation", "inward graph seed", "lens seeds are inward graphs");
  if (seed.base.num_vertices() != problem.base.num_vertices())
    throw PreconditionError("mesh_mismatch", "seed over the problem base", "seed does not match the base mesh");
  SolveResult r = finish(problem, newton_core(problem, seed.lambda, config, false), config);
  StageRecord s;
  s.k = problem.k_target;
  s.iterations = r.report.iterations;
  s.residual = r.report.residual_final;
  s.converged = r.report.converged;
  r.report.stages.push_back(s);
  return r;
}

SolveResult homotopy_solve(const LensProblem& problem, const HomotopySchedule& sched, const SolverConfig& config) {
  validate_problem(problem);
  const double c = problem.model.curvature_upper_bound();
  const auto& st = sched.stages;
  if (st.empty()) throw PreconditionError("invalid_schedule", "nonempty schedule", "homotopy schedule has no stages");
  for (size_t i = 0; i < st.size(); ++i) {
    if (!(st[i].first > 0.0 && st[i].first <= 1.0) || !(st[i].second > 0.0 && st[i].second < c))
      throw PreconditionError("invalid_schedule", "t in (0,1], 0 < k(t) < c", "schedule stage out of range");
    if (i > 0 && st[i].first < st[i - 1].first)
      throw PreconditionError("invalid_schedule", "t increasing", "schedule parameters must increase");
    if (i > 0 && sched.kind == ScheduleKind::KRamp && st[i].second < st[i - 1].second)
      throw PreconditionError("invalid_schedule", "k(t) monotone", "k_ramp schedules must be nondecreasing");
  }
  if (st.back().first != 1.0 || std::abs(st.back().second - problem.k_target) > 1e-14)
    throw PreconditionError("invalid_schedule", "final stage is (1, k_target)", "schedule must end at the target problem");

  auto stage_at = [&](double sigma) -> std::pair<double, double> {
    if (st.size() == 1) return st[0];
    double x = sigma * (st.size() - 1.0);
    size_t i = std::min(static_cast<size_t>(x), st.size() - 2);
    double w = x - i;
    return {(1 - w) * st[i].first + w * st[i + 1].first, (1 - w) * st[i].second + w * st[i + 1].second};
  };
  auto problem_at = [&](double t, double k) {
    LensProblem q = problem;
    q.k_target = k;
    if (t != 1.0) {
      if (!problem.patch)
        throw PreconditionError("patch_required", "parametrized base", "contracting-disk stages need the base patch");
      q.base = fit_fundamental_forms(problem.model, sample_patch(*problem.patch, problem.base.mesh_ptr(), t),
                                     problem.base.fit_options());
    }
    validate_problem(q);
    return q;
  };

  const DiskMesh& mesh = problem.base.mesh();
  auto [t0, k0] = stage_at(0.0);
  LensProblem q0 = problem_at(t0, k0);
  std::vector<double> seed_cur = spanning_equidistant_seed(problem.model, q0.base, k0).lambda;
  NewtonOutcome cur = newton_core(q0, seed_cur, config, sched.kind == ScheduleKind::KRamp);
  std::vector<StageRecord> records;
  records.push_back({t0, k0, cur.iterations, cur.history.back(), true, "n/a", 0.0});
  double sigma = 0.0, t_cur = t0, k_cur = k0;
  double h = st.size() > 1 ? 1.0 / (st.size() - 1.0) : 1.0;
  int clean = 0;
  std::string fail_code, fail_msg;
  while (sigma < 1.0) {
    double s_next = std::min(1.0, sigma + h);
    auto [t, k] = stage_at(s_next);
    try {
      LensProblem q = problem_at(t, k);
      std::vector<double> guess = cur.lambda;
      std::vector<double> seed_next = seed_cur;
      if (!cur.tangent.empty() && t == t_cur)
        for (int v : mesh.interior_vertices()) guess[v] += (k - k_cur) * cur.tangent[v];
      if (t != t_cur) {
        // The deviation from the spanning seed carries over in reference coordinates.
        seed_next = spanning_equidistant_seed(problem.model, q.base, k).lambda;
        for (int v : mesh.interior_vertices()) guess[v] = seed_next[v] + cur.lambda[v] - seed_cur[v];
      }
      NewtonOutcome next = newton_core(q, guess, config, sched.kind == ScheduleKind::KRamp);
      StageRecord rec{t, k, next.iterations, next.history.back(), true, "n/a", 0.0};
      if (t == t_cur && k > k_cur) {
        DominationResult d = domination_check(mesh, cur.lambda, next.lambda, 1e-6);
        rec.domination = to_string(d.kind);
        rec.domination_gap = d.min_gap;
        if (d.kind == DominationKind::Violated)
          throw SolverError("domination_violated", "k-ramp stage at k = " + std::to_string(k) +
                                                       " is not dominated by the previous stage");
      } else if (t > t_cur && k == k_cur) {
        std::vector<double> restricted(mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v)
          restricted[v] = interpolate(mesh, next.lambda, (t_cur / t) * mesh.reference()[v]);
        DominationResult d = domination_check(mesh, restricted, cur.lambda, 1e-6);
        rec.domination = to_string(d.kind);
        rec.domination_gap = d.min_gap;
      }
      records.push_back(rec);
      cur = std::move(next);
      seed_cur = std::move(seed_next);
      sigma = s_next;
      t_cur = t;
      k_cur = k;
      if (++clean >= 2) {
        h = std::min(2.0 * h, 1.0);
        clean = 0;
      }
    } catch (const KsurfError& e) {
      if (e.code() == "domination_violated") throw;
      if (dynamic_cast<const PreconditionError*>(&e) && e.code() != "seed_not_elliptic") throw;
      records.push_back({t, k, 0, std::numeric_limits<double>::quiet_NaN(), false, "n/a", 0.0});
      clean = 0;
      h *= 0.5;
      if (h < sched.min_step) {
        fail_code = e.code();
        fail_msg = e.what();
        break;
      }
    }
  }
  LensProblem qf = problem_at(t_cur, k_cur);
  SolveResult r = finish(qf, std::move(cur), config);
  r.report.stages = std::move(records);
  if (sigma < 1.0) {
    r.report.converged = false;
    r.report.failure = fail_code;
    r.report.failure_message = "stopped at t = " + std::to_string(t_cur) + ", k = " + std::to_string(k_cur) + ": " + fail_msg;
  }
  return r;
}

}  // namespace ksurf
