// Acceptance run: one line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ksurf/commands.hpp"
#include "ksurf/continuation.hpp"
#include "ksurf/diagnostics.hpp"
#include "ksurf/hyperboloid.hpp"
#include "ksurf/linearized.hpp"
#include "ksurf/plateau.hpp"
#include "ksurf/validation.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::shared_ptr<const DiskMesh> planar(int ref) {
  return std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, ref));
}

std::shared_ptr<const DiskMesh> polar(int ref) {
  return std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, ref));
}

double slope(const std::vector<int>& levels, const std::vector<double>& errs) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < levels.size(); ++i) {
    mx += levels[i];
    my += -std::log2(errs[i]);
  }
  mx /= levels.size();
  my /= levels.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < levels.size(); ++i) {
    sxy += (levels[i] - mx) * (-std::log2(errs[i]) - my);
    sxx += (levels[i] - mx) * (levels[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> field_on(const DiskMesh& mesh, const SmoothField& F, double offset) {
  std::vector<double> f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) f[v] = offset + F(mesh.reference()[v]);
  return f;
}

const AmbientModel H = AmbientModel::hyperbolic();
const std::vector<int> kLevels = {1, 2, 3, 4};

struct Family {
  const char* name;
  std::shared_ptr<const SurfacePatch> patch;
  double exact;
};

std::vector<Family> families() {
  return {{"sphere", std::make_shared<SphereCapPatch>(H, Vec3(0, 0, 1), 1.0, 1.0), oracle::sphere_kappa(1.0)},
          {"horosphere", std::make_shared<HorospherePatch>(1.0, 1.0), oracle::horosphere_kappa()},
          {"equidistant", std::make_shared<EquidistantPatch>(H, std::atanh(0.5), 1.0),
           oracle::equidistant_kappa(std::atanh(0.5))},
          {"tube", std::make_shared<TubePatch>(0.7, 1.0), oracle::tube_kappa(0.7)}};
}

// Solved lenses, shared by criteria 4, 5, 6 and 9.
struct Lenses {
  std::optional<LensProblem> problem;
  std::optional<SolveResult> ramp, disk, k02, k03;
};
Lenses lenses;

Lenses& solved_lenses() {
  if (!lenses.problem) {
    auto patch = std::make_shared<SphereCapPatch>(H, Vec3(0, 0, 1), 1.0, 0.7);
    lenses.problem = make_lens_problem(H, patch, polar(3), 0.25);
  }
  return lenses;
}

Outcome criterion1() {
  std::ostringstream d;
  bool ok = true;
  auto fams = families();
  std::vector<std::vector<double>> errs(fams.size());
  for (int l : kLevels) {
    auto mesh = planar(l);
    for (size_t i = 0; i < fams.size(); ++i) {
      ImmersedSurface s = fit_fundamental_forms(H, sample_patch(*fams[i].patch, mesh));
      double e = 0.0;
      for (int v : mesh->interior_vertices()) e = std::max(e, std::abs(s.forms()[v].kappa - fams[i].exact) / fams[i].exact);
      errs[i].push_back(e);
    }
  }
  for (size_t i = 0; i < fams.size(); ++i) {
    const double at3 = errs[i][2], order = slope(kLevels, errs[i]);
    ok = ok && at3 <= 1e-2 && order >= 1.5;
    d << fams[i].name << " err@3=" << fmt("%.2e", at3) << " order=" << fmt("%.2f", order) << "; ";
  }
  return {ok, d.str()};
}

Outcome criterion2() {
  const double r = std::atanh(0.5);
  EquidistantPatch p(H, r, 1.0);
  ImmersedSurface s = fit_fundamental_forms(H, sample_patch(p, planar(3)));
  AssembleOptions ao;
  ao.certify = false;
  OperatorAssembly A = assemble_L(H, s, ao);
  std::mt19937_64 rng(7);
  double worst = 0.0;
  const double t = 1e-5;
  for (int i = 0; i < 10; ++i) {
    auto f = field_on(s.mesh(), SmoothField::random(rng, 4, 1.0, 2.0), 1.0);
    std::vector<double> kap[2];
    for (int sg = 0; sg < 2; ++sg) {
      std::vector<Vec3> x(s.num_vertices());
      for (int v = 0; v < s.num_vertices(); ++v)
        x[v] = geodesic_flow(H, s.positions()[v], s.normals()[v], (sg ? -t : t) * f[v]).position;
      kap[sg] = extrinsic_curvature(fit_fundamental_forms(H, ImmersedSurface(s.mesh_ptr(), x, s.normals())));
    }
    auto Lf = A.apply(f);
    double err = 0.0, scale = 0.0;
    for (int v : s.mesh().interior_vertices()) {
      const double fd = (kap[0][v] - kap[1][v]) / (2 * t);
      err = std::max(err, std::abs(fd - Lf[v]));
      scale = std::max(scale, std::abs(fd));
    }
    worst = std::max(worst, err / scale);
  }
  const double expect = oracle::equidistant_unit_response(r);
  auto L1 = A.apply(std::vector<double>(s.num_vertices(), 1.0));
  double e1 = 0.0;
  for (int v : s.mesh().interior_vertices()) e1 = std::max(e1, std::abs(L1[v] - expect) / expect);
  return {worst <= 1e-3 && e1 <= 1e-2 && std::abs(expect - 0.75) < 1e-12,
          "max FD defect " + fmt("%.2e", worst) + " over 10 fields; L(1) rel error " + fmt("%.2e", e1)};
}

Outcome criterion3() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rr(0.35, 0.8), bd(0.0, 1.0);
  auto mesh = planar(3);
  int tested = 0, drawn = 0, negative = 0;
  double minJ = std::numeric_limits<double>::infinity(), minf = minJ;
  while (tested < 50 && drawn < 500) {
    ++drawn;
    EquidistantPatch p(H, rr(rng), 1.0, SmoothField::random(rng, 3, 0.08, 2.0));
    ImmersedSurface s = fit_fundamental_forms(H, sample_patch(p, mesh));
    bool certified = true;
    for (int v : mesh->interior_vertices()) certified = certified && s.forms()[v].kappa > 0.0 && s.forms()[v].kappa < 1.0;
    if (!certified) continue;
    ++tested;
    ZerothOrderCertificate z = zeroth_order_certificate(H, s);
    minJ = std::min(minJ, z.min_J);
    OperatorAssembly A = assemble_certified_L(H, s);
    std::vector<double> boundary(s.num_vertices(), 0.0), rhs(s.num_vertices(), 0.0);
    for (int v : mesh->boundary_loop()) boundary[v] = bd(rng);
    auto sol = solve_dirichlet(A, rhs, boundary);
    double m = *std::min_element(sol.f.begin(), sol.f.end());
    minf = std::min(minf, m);
    negative += m < 0.0;
  }
  return {tested == 50 && minJ > 0.0 && negative == 0,
          std::to_string(tested) + " surfaces; min J " + fmt("%.3e", minJ) + "; min Dirichlet solution " +
              fmt("%.3e", minf)};
}

double lens_distance_from_center(const Vec3& p) {
  return std::acosh(to_hyperboloid(p)[3]);
}

double polar_angle(const Vec3& p, const Vec4& axis) {
  Vec4 x = to_hyperboloid(p);
  Eigen::Vector3d s = x.head<3>(), a = axis.head<3>();
  if (s.norm() < 1e-15) return 0.0;
  return std::acos(std::clamp(s.dot(a) / (s.norm() * a.norm()), -1.0, 1.0));
}

Outcome criterion4() {
  Lenses& L = solved_lenses();
  L.ramp = homotopy_solve(*L.problem, HomotopySchedule::k_ramp(0.1, 0.25, 4));
  const SolveReport& rep = L.ramp->report;
  oracle::LensProfile prof(0.25, 1.0, 0.7);
  const Vec4 axis = push_to_hyperboloid(Vec3(0, 0, 1), Vec3(0, 0, 1));
  double sup = 0.0;
  for (const Vec3& p : L.ramp->surface.positions())
    sup = std::max(sup, std::abs(lens_distance_from_center(p) - prof.radius_at(polar_angle(p, axis))));
  return {rep.converged && sup <= 1e-3 && rep.residual_final <= 1e-8 && rep.iterations <= 20,
          "profile sup error " + fmt("%.2e", sup) + "; residual " + fmt("%.2e", rep.residual_final) + " in " +
              std::to_string(rep.iterations) + " iterations"};
}

double sup_gap(const RadialGraph& a, const RadialGraph& b) {
  double m = 0.0;
  for (size_t v = 0; v < a.lambda.size(); ++v) m = std::max(m, std::abs(a.lambda[v] - b.lambda[v]));
  return m;
}

Outcome criterion5() {
  Lenses& L = solved_lenses();
  if (!L.ramp) L.ramp = homotopy_solve(*L.problem, HomotopySchedule::k_ramp(0.1, 0.25, 4));
  L.disk = homotopy_solve(*L.problem, HomotopySchedule::contracting_disk(0.25, 0.25, 4));
  const double gap = sup_gap(L.ramp->graph, L.disk->graph);
  return {L.ramp->report.converged && L.disk->report.converged && gap <= 1e-6,
          "k_ramp vs contracting_disk sup difference " + fmt("%.2e", gap)};
}

// Largest amount by which `lower` exceeds `upper`.
double violation(const RadialGraph& upper, const RadialGraph& lower) {
  double m = 0.0;
  for (size_t v = 0; v < upper.lambda.size(); ++v) m = std::max(m, lower.lambda[v] - upper.lambda[v]);
  return m;
}

Outcome criterion6() {
  Lenses& L = solved_lenses();
  if (!L.ramp) L.ramp = homotopy_solve(*L.problem, HomotopySchedule::k_ramp(0.1, 0.25, 4));
  LensProblem lo = *L.problem, hi = *L.problem;
  lo.k_target = 0.2;
  hi.k_target = 0.3;
  L.k02 = homotopy_solve(lo, HomotopySchedule::k_ramp(0.1, 0.2, 4));
  L.k03 = homotopy_solve(hi, HomotopySchedule::k_ramp(0.1, 0.3, 4));
  const double v1 = violation(L.k02->graph, L.ramp->graph), v2 = violation(L.ramp->graph, L.k03->graph);
  return {L.k02->report.converged && L.k03->report.converged && v1 <= 1e-6 && v2 <= 1e-6,
          "max violation 0.2/0.25 " + fmt("%.2e", v1) + ", 0.25/0.3 " + fmt("%.2e", v2)};
}

std::optional<ExhaustionResult> plateau;

Outcome criterion7() {
  IdealDiskData round;
  ExhaustionConfig cfg;
  cfg.refinement = 3;
  plateau = exhaustion_solve(H, round, 0.25, cfg);
  const ExhaustionReport& r = plateau->report;
  // Distance to the limit surface, recomputed from the positions.
  const double target = std::atanh(0.5);
  double probe_err = 0.0, interior_err = 0.0;
  const auto& pos = plateau->lens->surface.positions();
  for (int v : r.probe_vertices) probe_err = std::max(probe_err, std::abs(round_limit_distance(round, pos[v]) - target));
  for (int v : plateau->lens->surface.mesh().interior_vertices())
    interior_err = std::max(interior_err, std::abs(round_limit_distance(round, pos[v]) - target));
  double min_inc = std::numeric_limits<double>::infinity(), max_h = 0.0;
  for (size_t s = 1; s < r.trace.size(); ++s)
    for (size_t i = 0; i < r.trace[s].size(); ++i) min_inc = std::min(min_inc, r.trace[s][i] - r.trace[s - 1][i]);
  for (const auto& row : r.trace)
    for (double f : row) max_h = std::max(max_h, f);
  return {r.converged && interior_err <= 1e-2 && min_inc >= 0.0 && max_h <= r.delta_bound,
          std::to_string(r.stages.size()) + " stages; interior position error " + fmt("%.2e", interior_err) +
              " (probes " + fmt("%.2e", probe_err) + "); min trace increment " + fmt("%.2e", min_inc) +
              "; max height " + fmt("%.4f", max_h) + " <= delta " + fmt("%.4f", r.delta_bound)};
}

Outcome criterion8() {
  struct Case {
    std::string what;
    RunConfig cfg;
    std::string citation;
  };
  std::vector<Case> cases;
  const std::string global = "nonexistence_sphere_minus_at_most_two_points";
  const std::string kc = "k_surface_hypothesis_0_lt_k_lt_c";
  for (IdealKind kind : {IdealKind::FullSphere, IdealKind::SphereMinusOne, IdealKind::SphereMinusTwo}) {
    RunConfig c;
    c.command = Command::SolvePlateau;
    c.ideal = kind;
    cases.push_back({"ideal data", c, global});
  }
  for (Command cmd : {Command::SolveLens, Command::SolvePlateau})
    for (double k : {1.0, 1.5}) {
      RunConfig c;
      c.command = cmd;
      c.k = k;
      cases.push_back({"k=" + fmt("%g", k), c, kc});
    }
  int ok = 0;
  std::string bad;
  for (auto& cs : cases) {
    cs.cfg.out = "acceptance_out";
    CommandOutcome o = execute(cs.cfg);
    const bool good = o.exit_code == 3 && o.report.contains("error") &&
                      o.report["error"].value("citation", std::string()) == cs.citation;
    ok += good;
    if (!good) bad += " " + cs.what;
  }
  return {ok == static_cast<int>(cases.size()),
          std::to_string(ok) + "/" + std::to_string(cases.size()) + " refusals with exit 3 and citation" + bad};
}

Outcome criterion9() {
  Lenses& L = solved_lenses();
  double worst_lip = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
  int count = 0;
  bool all = true;
  auto audit = [&](const SolveResult& r) {
    InverseFunctionReport inv = inverse_function(H, r.graph, r.surface);
    BallInclusion b = boundary_ball_inclusion(H, r.surface, 1e-6);
    worst_lip = std::max(worst_lip, inv.lipschitz_ratio);
    worst_excess = std::max(worst_excess, b.max_excess);
    all = all && inv.lipschitz_ratio <= 2.05 && b.holds;
    ++count;
  };
  for (auto* r : {&L.ramp, &L.disk, &L.k02, &L.k03})
    if (*r) audit(**r);
  if (plateau && plateau->lens) audit(*plateau->lens);
  std::vector<double> defect;
  SphereCapPatch sphere(H, Vec3(0, 0, 1), 1.0, 1.0);
  for (int l : kLevels) {
    auto mesh = planar(l);
    ImmersedSurface s = fit_fundamental_forms(H, sample_patch(sphere, mesh));
    auto g = gauss_equation_defect(H, s);
    double m = 0.0;
    for (int v : mesh->interior_vertices()) m = std::max(m, std::abs(g[v]));
    defect.push_back(m);
  }
  const double order = slope(kLevels, defect);
  return {all && count == 5 && order >= 1.5,
          std::to_string(count) + " lenses; max Lipschitz ratio " + fmt("%.4f", worst_lip) + "; max ball excess " +
              fmt("%.2e", worst_excess) + "; Gauss defect order " + fmt("%.2f", order)};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {{1, 60, criterion1},  {2, 120, criterion2}, {3, 600, criterion3},
                                      {4, 300, criterion4}, {5, 600, criterion5}, {6, 600, criterion6},
                                      {7, 600, criterion7}, {8, 600, criterion8}, {9, 600, criterion9}};
  int failed = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const KsurfError& err) {
      o = {false, "error " + err.code() + ": " + err.what()};
    } catch (const std::exception& err) {
      o = {false, std::string("error: ") + err.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > e.limit_seconds) {
      o.pass = false;
      o.detail += "; over the time limit";
    }
    failed += !o.pass;
    std::printf("criterion %d: %s (%.1fs) %s\n", e.id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
