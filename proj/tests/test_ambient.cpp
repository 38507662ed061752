#include <doctest.h>

#include <random>

#include "ksurf/ambient.hpp"
#include "ksurf/errors.hpp"
#include "ksurf/hyperboloid.hpp"
#include "ksurf/isometry.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

const AmbientModel H = AmbientModel::hyperbolic();

Vec3 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), h(0.2, 4.0);
  return Vec3(u(rng), u(rng), h(rng));
}

Vec3 random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng));
}

}  // namespace

TEST_CASE("distance agrees with the half-space formula") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Vec3 p = random_point(rng), q = random_point(rng);
    const double d = oracle::halfspace_distance({p.x(), p.y(), p.z()}, {q.x(), q.y(), q.z()});
    CHECK(distance(H, p, q) == doctest::Approx(d).epsilon(1e-10));
    CHECK(distance(H, q, p) == doctest::Approx(distance(H, p, q)).epsilon(1e-12));
  }
}

TEST_CASE("isometries preserve distance") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    Isometry g = Isometry::random(rng, 0.7);
    Vec3 p = random_point(rng), q = random_point(rng);
    CHECK(distance(H, g.apply(p), g.apply(q)) == doctest::Approx(distance(H, p, q)).epsilon(1e-9));
  }
}

TEST_CASE("isometry algebra") {
  std::mt19937_64 rng(8);
  Isometry g = Isometry::random(rng, 0.5), h = Isometry::random(rng, 0.5);
  Vec3 p = random_point(rng);
  CHECK((g.inverse().apply(g.apply(p)) - p).norm() < 1e-10);
  CHECK((g.compose(h).apply(p) - g.apply(h.apply(p))).norm() < 1e-10);
  CHECK((Isometry::swap_zero_infinity().apply(Vec3(0, 0, 1)) - Vec3(0, 0, 1)).norm() < 1e-14);
  CHECK_THROWS_AS(Isometry::from_matrix(1.0, 2.0, 2.0, 4.0), KsurfError);
}

TEST_CASE("pushed vectors keep their metric length") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    Isometry g = Isometry::random(rng, 0.6);
    Vec3 p = random_point(rng), v = random_vector(rng);
    CHECK(metric_norm(H, g.apply(p), g.push_vector(H, p, v)) == doctest::Approx(metric_norm(H, p, v)).epsilon(1e-7));
  }
}

TEST_CASE("exp and log are inverse and radially isometric") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    Vec3 p = random_point(rng), q = random_point(rng);
    Vec3 v = log_vector(H, p, q);
    CHECK(metric_norm(H, p, v) == doctest::Approx(distance(H, p, q)).epsilon(1e-8));
    CHECK(distance(H, geodesic_flow(H, p, v, 1.0).position, q) < 1e-8);
  }
}

TEST_CASE("sectional curvature of H3 is -1 on every plane") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    Vec3 p = random_point(rng);
    CHECK(sectional_curvature(H, ChartPoint(p), random_vector(rng), random_vector(rng)) ==
          doctest::Approx(-1.0).epsilon(1e-8));
  }
}

TEST_CASE("curvature endomorphism is the identity for unit curvature -1") {
  TangentVector n{ChartPoint(0.3, -0.2, 1.7), Vec3(0.1, 0.4, 1.0)};
  n.components = metric_normalize(H, n.base.coords(), n.components);
  CurvatureEndomorphism W = curvature_endomorphism(H, n);
  CHECK((W.w - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("model surface curvatures match the closed forms") {
  auto kap = [](ModelFamilyKind k, double r) { return model_surface_curvatures(H, {k, r}).kappa; };
  CHECK(kap(ModelFamilyKind::Sphere, 1.0) == doctest::Approx(oracle::sphere_kappa(1.0)).epsilon(1e-12));
  CHECK(oracle::sphere_kappa(1.0) == doctest::Approx(1.72406).epsilon(1e-5));
  CHECK(kap(ModelFamilyKind::Horosphere, 1.0) == doctest::Approx(1.0));
  CHECK(kap(ModelFamilyKind::EquidistantToPlane, std::atanh(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(kap(ModelFamilyKind::TubeAroundGeodesic, 0.7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Busemann function of the point at infinity") {
  ChartPoint base(0, 0, 1);
  for (double z : {0.3, 1.0, 2.5}) {
    ChartPoint p(0.7, -1.1, z);
    CHECK(busemann(H, p, IdealPoint::infinity(), base) == doctest::Approx(-std::log(z)).epsilon(1e-12));
  }
}

TEST_CASE("hyperboloid coordinates round-trip") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 20; ++i) {
    Vec3 p = random_point(rng);
    Vec4 x = to_hyperboloid(p);
    CHECK(minkowski(x, x) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((from_hyperboloid(x) - p).norm() < 1e-10 * (1.0 + p.norm()));
  }
}

TEST_CASE("chart points below the boundary are refused") {
  CHECK_THROWS_AS(require_chart_point(Vec3(0, 0, -1)), PreconditionError);
  CHECK_THROWS_AS(ChartPoint(0, 0, 0), PreconditionError);
}

TEST_CASE("warped models certify their curvature bound") {
  AmbientModel ok = AmbientModel::warped({{Vec3(0, 0, 1), 0.05, 1.0}}, 0.5);
  CHECK(ok.certified_max_sectional() <= -0.5 + 1e-6);
  CHECK(max_sectional_curvature(ok, Vec3(0, 0, 1)) <= -0.5 + 1e-6);
  CHECK_THROWS_AS(AmbientModel::warped({{Vec3(0, 0, 1), 0.2, 0.5}}, 0.5), PreconditionError);
}

TEST_CASE("fault injection flips the curvature endomorphism") {
  AmbientModel bad = H.with_fault(FaultInjection::FlipCurvatureSign);
  TangentVector n{ChartPoint(0, 0, 1), Vec3(0, 0, 1)};
  CHECK(curvature_endomorphism(bad, n).w(0, 0) == doctest::Approx(-1.0).epsilon(1e-8));
}
