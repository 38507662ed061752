#include <doctest.h>

#include <random>

#include "ksurf/errors.hpp"
#include "ksurf/linearized.hpp"
#include "ksurf/parametrized.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

const AmbientModel H = AmbientModel::hyperbolic();

ImmersedSurface equidistant(int ref, double r = std::atanh(0.5), SmoothField pert = {},
                            const AmbientModel& model = H) {
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, ref));
  return fit_fundamental_forms(model, sample_patch(EquidistantPatch(model, r, 1.0, std::move(pert)), mesh));
}

// Exhaustive active-set search: the best least-squares fit over every
// support, keeping supports whose unconstrained solution is nonnegative.
Eigen::VectorXd nnls_by_enumeration(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_r = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Eigen::MatrixXd S(A.rows(), cols.size());
    for (size_t j = 0; j < cols.size(); ++j) S.col(j) = A.col(cols[j]);
    Eigen::VectorXd y = S.colPivHouseholderQr().solve(b);
    if (y.minCoeff() < 0.0) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (size_t j = 0; j < cols.size(); ++j) x[cols[j]] = y[j];
    const double r = (A * x - b).norm();
    if (r < best_r - 1e-12) {
      best_r = r;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("nonnegative least squares matches exhaustive search") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd A(8, 5);
    Eigen::VectorXd b(8);
    for (int i = 0; i < 8; ++i) {
      b[i] = n(rng);
      for (int j = 0; j < 5; ++j) A(i, j) = n(rng);
    }
    Eigen::VectorXd x = nonnegative_least_squares(A, b), y = nnls_by_enumeration(A, b);
    CHECK(x.minCoeff() >= 0.0);
    CHECK((A * x - b).norm() == doctest::Approx((A * y - b).norm()).epsilon(1e-9));
  }
}

TEST_CASE("constant field on the equidistant surface") {
  const double r = std::atanh(0.5);
  ImmersedSurface s = equidistant(3, r);
  OperatorAssembly A = assemble_L(H, s);
  const double expect = oracle::equidistant_unit_response(r);
  CHECK(expect == doctest::Approx(0.75));
  auto L1 = A.apply(std::vector<double>(s.num_vertices(), 1.0));
  for (int v : s.mesh().interior_vertices()) CHECK(L1[v] == doctest::Approx(expect).epsilon(1e-2));
  for (int v : s.mesh().boundary_loop()) CHECK(std::isnan(L1[v]));
}

TEST_CASE("assembly is linear") {
  ImmersedSurface s = equidistant(2);
  AssembleOptions ao;
  ao.certify = false;
  OperatorAssembly A = assemble_L(H, s, ao);
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n;
  std::vector<double> f(s.num_vertices()), g(s.num_vertices()), h(s.num_vertices());
  for (int v = 0; v < s.num_vertices(); ++v) {
    f[v] = n(rng);
    g[v] = n(rng);
    h[v] = 2.0 * f[v] - 0.5 * g[v];
  }
  auto Lf = A.apply(f), Lg = A.apply(g), Lh = A.apply(h);
  for (int v : s.mesh().interior_vertices()) CHECK(Lh[v] == doctest::Approx(2.0 * Lf[v] - 0.5 * Lg[v]).epsilon(1e-10));
}

TEST_CASE("zeroth-order coefficient is positive on convex surfaces") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 5; ++i) {
    ImmersedSurface s = equidistant(2, 0.4 + 0.08 * i, SmoothField::random(rng, 3, 0.05, 2.0));
    ZerothOrderCertificate z = zeroth_order_certificate(H, s);
    CHECK(z.min_J > 0.0);
  }
}

TEST_CASE("zeroth-order certificate refuses kappa above c") {
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, 2));
  ImmersedSurface s = fit_fundamental_forms(H, sample_patch(SphereCapPatch(H, Vec3(0, 0, 1), 1.0, 1.0), mesh));
  try {
    zeroth_order_certificate(H, s);
    FAIL("expected a refusal");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "kappa_outside_interval");
  }
}

TEST_CASE("flipped curvature sign makes J negative") {
  const AmbientModel bad = H.with_fault(FaultInjection::FlipCurvatureSign);
  ImmersedSurface s = equidistant(2, std::atanh(0.5), {}, bad);
  CHECK_THROWS_AS(zeroth_order_certificate(bad, s), PreconditionError);
}

TEST_CASE("certified operator satisfies the discrete maximum principle") {
  ImmersedSurface s = equidistant(3);
  OperatorAssembly A = assemble_certified_L(H, s);
  CHECK(A.certificate.kind != MaxPrincipleKind::Violated);
  CHECK(A.certificate.kind != MaxPrincipleKind::NotChecked);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> boundary(s.num_vertices(), 0.0), rhs(s.num_vertices(), 0.0);
  for (int v : s.mesh().boundary_loop()) boundary[v] = u(rng);
  auto sol = solve_dirichlet(A, rhs, boundary);
  CHECK(*std::min_element(sol.f.begin(), sol.f.end()) >= 0.0);
}

TEST_CASE("positive stencil is an M-matrix") {
  ImmersedSurface s = equidistant(3);
  AssembleOptions ao;
  ao.stencil = HessianStencil::Positive;
  OperatorAssembly A = assemble_L(H, s, ao);
  CHECK(A.certificate.positive_offdiagonals == 0);
  CHECK(A.certificate.kind == MaxPrincipleKind::MMatrix);
}

TEST_CASE("Dirichlet solve reproduces a manufactured solution") {
  ImmersedSurface s = equidistant(2);
  OperatorAssembly A = assemble_certified_L(H, s);
  std::vector<double> fstar(s.num_vertices());
  for (int v = 0; v < s.num_vertices(); ++v) fstar[v] = 1.0 + 0.3 * s.mesh().reference()[v].x();
  auto rhs = A.apply(fstar);
  std::vector<double> boundary(s.num_vertices(), 0.0);
  for (int v : s.mesh().boundary_loop()) {
    boundary[v] = fstar[v];
    rhs[v] = 0.0;
  }
  auto sol = solve_dirichlet(A, rhs, boundary);
  for (int v = 0; v < s.num_vertices(); ++v) CHECK(sol.f[v] == doctest::Approx(fstar[v]).epsilon(1e-8));
}

TEST_CASE("shape operator variation of a unit push on an equidistant") {
  const double r = std::atanh(0.5);
  ImmersedSurface s = equidistant(3, r);
  VariationCheck vc = shape_operator_variation_check(H, s, std::vector<double>(s.num_vertices(), 1.0));
  const double expect = 1.0 - std::tanh(r) * std::tanh(r);
  for (int v : s.mesh().interior_vertices()) {
    CHECK(vc.assembled[v](0, 0) == doctest::Approx(expect).epsilon(1e-3));
    CHECK(std::abs(vc.assembled[v](0, 1)) < 1e-3);
  }
  CHECK(vc.relative < 1e-3);
}
