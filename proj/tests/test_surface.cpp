#include <doctest.h>

#include <random>

#include "ksurf/errors.hpp"
#include "ksurf/parametrized.hpp"
#include "ksurf/radial_graph.hpp"
#include "ksurf/surface.hpp"
#include "oracles.hpp"

using namespace ksurf;

namespace {

const AmbientModel H = AmbientModel::hyperbolic();

std::shared_ptr<const DiskMesh> planar(int ref) {
  return std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, ref));
}

double max_rel_kappa_error(const SurfacePatch& p, int ref, double exact) {
  auto mesh = planar(ref);
  ImmersedSurface s = fit_fundamental_forms(H, sample_patch(p, mesh));
  double e = 0.0;
  for (int v : mesh->interior_vertices()) e = std::max(e, std::abs(s.forms()[v].kappa - exact) / exact);
  return e;
}

}  // namespace

TEST_CASE("disk meshes are topological disks") {
  for (DiskMeshKind kind : {DiskMeshKind::GeodesicPolarCap, DiskMeshKind::PlanarDiskSample})
    for (int ref = 0; ref <= 4; ++ref) {
      DiskMesh m = make_disk_mesh(kind, ref);
      CHECK(m.topology().is_disk());
      CHECK(m.topology().vertices - m.topology().edges + m.topology().faces == 1);
      CHECK(m.boundary_loop().size() + m.interior_vertices().size() == static_cast<size_t>(m.num_vertices()));
    }
}

TEST_CASE("closed sphere mesh has no boundary") {
  DiskMesh m = make_closed_sphere_mesh(1);
  CHECK(m.topology().euler == 2);
  CHECK(m.topology().boundary_loops == 0);
  CHECK_FALSE(m.topology().is_disk());
}

TEST_CASE("neighborhoods are sorted and exclude the center") {
  DiskMesh m = make_disk_mesh(DiskMeshKind::PlanarDiskSample, 2);
  auto n = m.neighborhood(0, 2);
  CHECK(std::is_sorted(n.begin(), n.end()));
  CHECK(std::find(n.begin(), n.end(), 0) == n.end());
  CHECK(n.size() > m.one_ring(0).size());
}

TEST_CASE("closed-form families at refinement 3") {
  CHECK(max_rel_kappa_error(SphereCapPatch(H, Vec3(0, 0, 1), 1.0, 1.0), 3, oracle::sphere_kappa(1.0)) <= 1e-2);
  CHECK(max_rel_kappa_error(HorospherePatch(1.0, 1.0), 3, oracle::horosphere_kappa()) <= 1e-2);
  CHECK(max_rel_kappa_error(EquidistantPatch(H, std::atanh(0.5), 1.0), 3, oracle::equidistant_kappa(std::atanh(0.5))) <=
        1e-2);
  CHECK(max_rel_kappa_error(TubePatch(0.7, 1.0), 3, oracle::tube_kappa(0.7)) <= 1e-2);
}

TEST_CASE("curvature error decreases under refinement") {
  TubePatch tube(0.7, 1.0);
  double prev = 1e9;
  for (int ref = 1; ref <= 4; ++ref) {
    double e = max_rel_kappa_error(tube, ref, oracle::tube_kappa(0.7));
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("principal curvatures are the eigenvalues, ascending") {
  Mat2 b;
  b << 2.0, 0.5, 0.5, 1.0;
  Vec2 l = principal_curvatures(b);
  CHECK(l[0] <= l[1]);
  CHECK(l[0] * l[1] == doctest::Approx(b.determinant()));
  CHECK(l[0] + l[1] == doctest::Approx(b.trace()));
  bool umbilic = false;
  principal_curvatures(Mat2::Identity() * 0.3, &umbilic);
  CHECK(umbilic);
}

TEST_CASE("forms are consistent and extrinsic curvature is the determinant") {
  SphereCapPatch p(H, Vec3(0, 0, 1), 1.0, 1.0);
  ImmersedSurface s = fit_fundamental_forms(H, sample_patch(p, planar(2)));
  auto kap = extrinsic_curvature(s);
  auto mean = mean_curvature(s);
  for (int v = 0; v < s.num_vertices(); ++v) {
    const auto& f = s.forms()[v];
    CHECK(kap[v] == f.principal[0] * f.principal[1]);
    CHECK(mean[v] == f.principal[0] + f.principal[1]);
    CHECK(metric_norm(H, s.positions()[v], s.normals()[v]) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("unfitted surfaces refuse to report forms") {
  auto mesh = planar(1);
  ImmersedSurface s = sample_patch(HorospherePatch(1.0, 1.0), mesh);
  CHECK_FALSE(s.has_forms());
  CHECK_THROWS_AS(s.forms(), PreconditionError);
}

TEST_CASE("Gauss equation defect is small on a sphere") {
  SphereCapPatch p(H, Vec3(0, 0, 1), 1.0, 1.0);
  ImmersedSurface s = fit_fundamental_forms(H, sample_patch(p, planar(3)));
  auto g = gauss_equation_defect(H, s);
  for (int v : s.mesh().interior_vertices()) CHECK(std::abs(g[v]) < 5e-2);
  for (int v : s.mesh().boundary_loop()) CHECK(std::isnan(g[v]));
}

TEST_CASE("curvature is invariant under isometries") {
  std::mt19937_64 rng(21);
  auto base = std::make_shared<EquidistantPatch>(H, 0.4, 1.0);
  TransformedPatch moved(base, Isometry::random(rng, 0.5));
  auto mesh = planar(2);
  ImmersedSurface a = fit_fundamental_forms(H, sample_patch(*base, mesh));
  ImmersedSurface b = fit_fundamental_forms(H, sample_patch(moved, mesh));
  for (int v : mesh->interior_vertices()) CHECK(std::abs(a.forms()[v].kappa - b.forms()[v].kappa) < 1e-6);
}

TEST_CASE("zero graph embeds onto its base") {
  SphereCapPatch p(H, Vec3(0, 0, 1), 1.0, 0.7);
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, 2));
  ImmersedSurface base = fit_fundamental_forms(H, sample_patch(p, mesh));
  RadialGraph g = make_radial_graph(base, std::vector<double>(base.num_vertices(), 0.0));
  auto x = graph_positions(H, g);
  for (int v = 0; v < base.num_vertices(); ++v) CHECK(x[v] == base.positions()[v]);
}

TEST_CASE("graphs with nonzero boundary heights are refused") {
  SphereCapPatch p(H, Vec3(0, 0, 1), 1.0, 0.7);
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, 1));
  ImmersedSurface base = fit_fundamental_forms(H, sample_patch(p, mesh));
  CHECK_THROWS_AS(make_radial_graph(base, std::vector<double>(base.num_vertices(), 0.1)), PreconditionError);
}

TEST_CASE("radial graph of a sphere cap moves along radii") {
  // Inward heights over a sphere about the center land on the concentric
  // sphere, up to the error of the fitted normals.
  SphereCapPatch p(H, Vec3(0, 0, 1), 1.0, 0.7);
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, 2));
  ImmersedSurface base = fit_fundamental_forms(H, sample_patch(p, mesh));
  std::vector<double> lambda(base.num_vertices(), 0.0);
  for (int v : mesh->interior_vertices()) lambda[v] = 0.2;
  auto x = graph_positions(H, make_radial_graph(base, lambda));
  for (int v : mesh->interior_vertices()) CHECK(distance(H, x[v], Vec3(0, 0, 1)) == doctest::Approx(0.8).epsilon(1e-4));
}
