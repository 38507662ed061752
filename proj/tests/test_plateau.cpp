#include <doctest.h>

#include <random>

#include "ksurf/errors.hpp"
#include "ksurf/plateau.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

const AmbientModel H = AmbientModel::hyperbolic();

std::string precondition_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const PreconditionError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("global ideal data is refused with its citation") {
  int punctures = 0;
  for (GlobalDataKind g : {GlobalDataKind::FullSphere, GlobalDataKind::SphereMinusOne, GlobalDataKind::SphereMinusTwo}) {
    Refusal r = reject_global_data(g);
    CHECK(r.code == "global_data_refused");
    CHECK(r.citation == "nonexistence_sphere_minus_at_most_two_points");
    CHECK(r.punctures == punctures++);
    CHECK(parse_global_data_kind(to_string(g)) == g);
    CHECK_THROWS_AS(throw_refusal(r), PreconditionError);
  }
  CHECK_FALSE(parse_global_data_kind("torus").has_value());
}

TEST_CASE("ideal disk data validation") {
  IdealDiskData d;
  CHECK(d.round());
  CHECK(precondition_code([&] { d.validate(); }).empty());
  IdealDiskData a = d;
  a.alpha = M_PI;
  CHECK(precondition_code([&] { a.validate(); }) == "alpha_out_of_range");
  IdealDiskData big = d;
  big.perturbation = {{2, 0.2, 0.1}};
  CHECK(precondition_code([&] { big.validate(); }) == "perturbation_too_large");
  IdealDiskData m0 = d;
  m0.perturbation = {{0, 0.1, 0.0}};
  CHECK(precondition_code([&] { m0.validate(); }) == "invalid_perturbation");
}

TEST_CASE("perturbation evaluation and derivative") {
  IdealDiskData d;
  d.perturbation = {{2, 0.1, -0.05}, {3, 0.02, 0.01}};
  CHECK(d.amplitude() == doctest::Approx(0.18));
  for (double th : {0.0, 0.4, 2.0, 5.5}) {
    const double h = 1e-6;
    const double fd = (d.perturbation_at(th + h) - d.perturbation_at(th - h)) / (2 * h);
    CHECK(d.perturbation_derivative(th) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(d.canonical_point(th).norm() == doctest::Approx(std::exp(d.perturbation_at(th))));
  }
}

TEST_CASE("radial remap fixes the inner half and reaches the radius") {
  for (double radius : {0.75, 0.875, 0.999}) {
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double rho = i / 100.0;
      const double e = radial_remap(rho, radius);
      if (rho <= 0.5) CHECK(e == doctest::Approx(rho));
      CHECK(e > prev);
      prev = e;
    }
    CHECK(radial_remap(1.0, radius) == doctest::Approx(radius));
  }
}

TEST_CASE("round barrier is the exact equidistant surface") {
  IdealDiskData round;
  BarrierOptions opts;
  opts.refinement = 2;
  BarrierSurface b = barrier_surface(H, round, 0.25, opts);
  CHECK(b.epsilon == doctest::Approx(std::atanh(0.5) + 0.1));
  for (const Vec3& p : b.surface.positions()) CHECK(round_limit_distance(round, p) == doctest::Approx(b.epsilon).epsilon(1e-9));
  for (int v : b.surface.mesh().interior_vertices()) CHECK(b.surface.forms()[v].kappa > 0.25);
}

TEST_CASE("cone barrier on the axis matches the closed form") {
  for (double alpha : {M_PI / 3, 1.2, M_PI / 2}) {
    ConeBarrierEstimate e = cone_barrier_delta(H, alpha, 0.0, 0.25, 8);
    CHECK(e.delta == doctest::Approx(oracle::cone_delta_axis(alpha, 0.25)).epsilon(1e-6));
  }
}

TEST_CASE("cone barrier shrinks as the cone opens") {
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha = 0.5; alpha <= M_PI / 2 + 1e-12; alpha += 0.15) {
    const double d = cone_barrier_delta(H, alpha, 0.0, 0.25, 8).delta;
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("cone barrier refuses angles outside the hypothesis") {
  CHECK_THROWS_AS(cone_barrier_delta(H, 1.0, 1.2, 0.25, 8), PreconditionError);
  CHECK_THROWS_AS(cone_barrier_delta(H, 2.0, 0.0, 0.25, 8), PreconditionError);
}

TEST_CASE("alpha0 covers the hemisphere") {
  Alpha0Measurement a = measure_alpha0(H, 0.25);
  CHECK(a.alpha0 >= M_PI / 2 - 1e-12);
  CHECK(a.tested.size() == a.passed.size());
}

TEST_CASE("round exhaustion at refinement 2") {
  IdealDiskData round;
  ExhaustionConfig cfg;
  cfg.refinement = 2;
  ExhaustionResult r = exhaustion_solve(H, round, 0.25, cfg);
  REQUIRE(r.report.converged);
  CHECK(r.report.monotone);
  CHECK(r.report.bounded);
  CHECK(r.report.closed_form_error.value() <= 2e-2);
  for (size_t s = 1; s < r.report.trace.size(); ++s)
    for (size_t i = 0; i < r.report.trace[s].size(); ++i) CHECK(r.report.trace[s][i] >= r.report.trace[s - 1][i]);
}

TEST_CASE("exhaustion commutes with isometries") {
  std::mt19937_64 rng(43);
  IdealDiskData round, moved;
  moved.placement = Isometry::random(rng, 0.5);
  ExhaustionConfig cfg;
  cfg.refinement = 1;
  ExhaustionResult a = exhaustion_solve(H, round, 0.25, cfg);
  ExhaustionResult b = exhaustion_solve(H, moved, 0.25, cfg);
  REQUIRE(a.lens);
  REQUIRE(b.lens);
  const auto& pa = a.lens->surface.positions();
  const auto& pb = b.lens->surface.positions();
  for (size_t v = 0; v < pa.size(); ++v) CHECK(distance(H, moved.placement.apply(pa[v]), pb[v]) < 1e-6);
}

TEST_CASE("perturbed ideal data is solved monotonically") {
  IdealDiskData d;
  d.perturbation = {{2, 0.05, 0.0}};
  ExhaustionConfig cfg;
  cfg.refinement = 2;
  ExhaustionResult r = exhaustion_solve(H, d, 0.25, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.monotone);
  CHECK(r.report.bounded);
  CHECK_FALSE(r.report.closed_form_error.has_value());
}

TEST_CASE("plateau solver checks k") {
  IdealDiskData d;
  CHECK(precondition_code([&] { exhaustion_solve(H, d, 1.0); }) == "k_outside_interval");
}
