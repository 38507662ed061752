#include <doctest.h>

#include <random>

#include "ksurf/continuation.hpp"
#include "ksurf/diagnostics.hpp"
#include "ksurf/errors.hpp"
#include "ksurf/hyperboloid.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

const AmbientModel H = AmbientModel::hyperbolic();

std::shared_ptr<const DiskMesh> polar(int ref) {
  return std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, ref));
}

LensProblem cap_problem(int ref, double k) {
  auto patch = std::make_shared<SphereCapPatch>(H, Vec3(0, 0, 1), 1.0, 0.7);
  return make_lens_problem(H, patch, polar(ref), k);
}

std::string precondition_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const PreconditionError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("shooting oracle traces an equidistant curve") {
  // The rotational k-surface through a round circle is equidistant from a
  // plane perpendicular to the axis: <x, m> = sinh r with tanh^2 r = k.
  const double k = 0.25, r = std::atanh(0.5);
  oracle::LensProfile prof(k, 1.0, 0.7);
  const double beta = prof.apex_distance() - r;
  for (const auto& [theta, rho] : prof.samples()) {
    const double q = std::sinh(rho) * std::cos(theta) * std::cosh(beta) - std::cosh(rho) * std::sinh(beta);
    CHECK(q == doctest::Approx(std::sinh(r)).epsilon(1e-6));
  }
  CHECK(prof.samples().back().first == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("equidistant seed distance") {
  // Pushing off by R turns a principal curvature l into tanh(artanh l + R).
  CHECK(equidistant_seed_distance(H, 0.5, 0.81) == doctest::Approx(std::atanh(0.9) - std::atanh(0.5)));
  CHECK(equidistant_seed_distance(H, 0.6, 0.25) == 0.0);
  CHECK(std::tanh(std::atanh(0.5) + equidistant_seed_distance(H, 0.5, 0.81)) == doctest::Approx(0.9));
}

TEST_CASE("schedules end at the target problem") {
  auto ramp = HomotopySchedule::k_ramp(0.1, 0.25, 4);
  CHECK(ramp.stages.size() == 4);
  CHECK(ramp.stages.back() == std::make_pair(1.0, 0.25));
  auto disk = HomotopySchedule::contracting_disk(0.25, 0.25, 4);
  CHECK(disk.stages.front().first == doctest::Approx(0.25));
  CHECK(disk.stages.back() == std::make_pair(1.0, 0.25));
  for (size_t i = 1; i < disk.stages.size(); ++i) CHECK(disk.stages[i].first > disk.stages[i - 1].first);
}

TEST_CASE("lens problems check their hypotheses") {
  LensProblem p = cap_problem(2, 0.25);
  CHECK(precondition_code([&] { validate_problem(p); }).empty());
  for (double k : {0.0, 1.0, 1.5}) {
    LensProblem q = p;
    q.k_target = k;
    CHECK(precondition_code([&] { validate_problem(q); }) == "k_outside_interval");
  }
  LensProblem m = p;
  m.margin = 0.0;
  CHECK(precondition_code([&] { validate_problem(m); }) == "invalid_margin");

  auto closed = std::make_shared<const DiskMesh>(make_closed_sphere_mesh(1));
  std::vector<Vec3> pos(closed->num_vertices(), Vec3(0, 0, 1));
  LensProblem c{.model = H, .base = ImmersedSurface(closed, pos, pos), .k_target = 0.25, .margin = 1e-3,
                .barrier_base = false, .patch = nullptr};
  CHECK(precondition_code([&] { validate_problem(c); }) == "closed_surface_refused");
}

TEST_CASE("bases with kappa below c are refused") {
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, 2));
  auto patch = std::make_shared<EquidistantPatch>(H, std::atanh(0.5), 1.0);
  LensProblem p = make_lens_problem(H, patch, mesh, 0.2);
  CHECK(precondition_code([&] { validate_problem(p); }) == "base_not_convex");
}

TEST_CASE("invalid schedules are refused") {
  LensProblem p = cap_problem(2, 0.25);
  HomotopySchedule wrong_end = HomotopySchedule::k_ramp(0.1, 0.2, 3);
  CHECK(precondition_code([&] { homotopy_solve(p, wrong_end); }) == "invalid_schedule");
  HomotopySchedule down = HomotopySchedule::k_ramp(0.3, 0.25, 3);
  CHECK(precondition_code([&] { homotopy_solve(p, down); }) == "invalid_schedule");
}

TEST_CASE("lens at refinement 2 matches the shooting oracle") {
  LensProblem p = cap_problem(2, 0.25);
  SolveResult r = homotopy_solve(p, HomotopySchedule::k_ramp(0.1, 0.25, 4));
  REQUIRE(r.report.converged);
  CHECK(r.report.residual_final <= 1e-8);
  CHECK(r.report.min_interior_lambda > 0.0);
  oracle::LensProfile prof(0.25, 1.0, 0.7);
  const Vec4 axis = push_to_hyperboloid(Vec3(0, 0, 1), Vec3(0, 0, 1));
  for (const Vec3& x : r.surface.positions()) {
    Vec4 h = to_hyperboloid(x);
    Eigen::Vector3d s = h.head<3>();
    const double theta = std::acos(std::clamp(s.dot(axis.head<3>()) / (s.norm() * axis.head<3>().norm()), -1.0, 1.0));
    CHECK(std::acosh(h[3]) == doctest::Approx(prof.radius_at(theta)).epsilon(5e-3));
  }
}

TEST_CASE("lens solutions are ordered in k and pass the audits") {
  LensProblem p = cap_problem(2, 0.25);
  SolveResult mid = homotopy_solve(p, HomotopySchedule::k_ramp(0.1, 0.25, 4));
  LensProblem q = p;
  q.k_target = 0.3;
  SolveResult hi = homotopy_solve(q, HomotopySchedule::k_ramp(0.1, 0.3, 4));
  DominationResult d = domination_check(mid.graph, hi.graph, 1e-6);
  CHECK(d.kind != DominationKind::Violated);
  CHECK(inverse_function(H, mid.graph, mid.surface).lipschitz_ratio <= 2.05);
  CHECK(boundary_ball_inclusion(H, mid.surface, 1e-6).holds);
  for (size_t i = 1; i < mid.report.stages.size(); ++i) CHECK(mid.report.stages[i].domination != "violated");
}

TEST_CASE("domination check classifies orderings") {
  DiskMesh mesh = make_disk_mesh(DiskMeshKind::PlanarDiskSample, 1);
  std::vector<double> a(mesh.num_vertices(), 0.0), b(mesh.num_vertices(), 0.0);
  CHECK(domination_check(mesh, a, b).kind == DominationKind::Weak);
  for (int v : mesh.interior_vertices()) a[v] = 0.1;
  CHECK(domination_check(mesh, a, b).kind == DominationKind::Strict);
  b[mesh.interior_vertices().front()] = 0.2;
  DominationResult r = domination_check(mesh, a, b);
  CHECK(r.kind == DominationKind::Violated);
  CHECK(r.witnesses == std::vector<int>{mesh.interior_vertices().front()});
}

TEST_CASE("enclosing ball of points on a sphere") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n;
  std::vector<Vec3> pts;
  const Vec3 c(0.2, -0.1, 1.5);
  for (int i = 0; i < 200; ++i) {
    Vec3 v(n(rng), n(rng), n(rng));
    pts.push_back(geodesic_flow(H, c, metric_normalize(H, c, v) * 0.8, 1.0).position);
  }
  EnclosingBall b = minimal_enclosing_ball(H, pts);
  CHECK(b.radius == doctest::Approx(0.8).epsilon(2e-2));
  for (const Vec3& p : pts) CHECK(distance(H, b.center, p) <= b.radius + 1e-12);
}
