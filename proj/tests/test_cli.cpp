#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ksurf/commands.hpp"
#include "ksurf/config.hpp"
#include "ksurf/report_io.hpp"
#include "ksurf/validation.hpp"

using namespace ksurf;
namespace fs = std::filesystem;

namespace {

std::string io_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const IoError& e) {
    return e.code();
  }
  return "";
}

std::string scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "ksurf_tests" / name;
  fs::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("config text grammar") {
  RunConfig c = parse_config_text(
      "# lens run\n"
      "k = 0.2\n"
      "\n"
      "schedule = contracting_disk   # trailing comment\n"
      "fourier = 2, 0.05, 0\n"
      "fourier = 3, 0, -0.01\n"
      "gauss_image_inside = false\n"
      "refinement = 2\n"
      "seed = 99\n");
  CHECK(c.k == 0.2);
  CHECK(c.schedule == ScheduleKind::ContractingDisk);
  REQUIRE(c.fourier.size() == 2);
  CHECK(c.fourier[1].m == 3);
  CHECK(c.fourier[1].sin_coeff == -0.01);
  CHECK_FALSE(c.gauss_image_inside);
  CHECK(c.refinement == 2);
  CHECK(c.seed == 99);
  CHECK(c.tol == 1e-8);
}

TEST_CASE("config errors name the line") {
  for (const char* bad : {"k = 0.2\nk = 0.3\n", "k = 0.2\nbogus = 1\n", "k = 0.2\nrefinement = three\n",
                          "k = 0.2\njust words\n", "k = 0.2\nschedule = spiral\n"}) {
    try {
      parse_config_text(bad);
      FAIL("accepted " << bad);
    } catch (const IoError& e) {
      CHECK(e.code() == "config_invalid");
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
  }
}

TEST_CASE("unreadable config file") {
  CHECK(io_code([] { load_config_file("/nonexistent/ksurf.cfg"); }) == "config_unreadable");
}

TEST_CASE("overrides replace only given fields") {
  RunConfig c = parse_config_text("k = 0.2\nrefinement = 2\n");
  ConfigOverrides o;
  o.refinement = 4;
  RunConfig d = apply_overrides(c, o);
  CHECK(d.refinement == 4);
  CHECK(d.k == 0.2);
}

TEST_CASE("config range checks") {
  auto code_of = [](const std::string& text) { return io_code([&] { validate_config(parse_config_text(text)); }); };
  CHECK(code_of("").empty());
  CHECK(code_of("refinement = 7\n") == "config_invalid");
  CHECK(code_of("refinement = -1\n") == "config_invalid");
  CHECK(code_of("tol = 0\n") == "config_invalid");
  CHECK(code_of("c = 2\n") == "config_invalid");
  CHECK(code_of("warp_bump = 0, 0, 1, 0.05, 1\n") == "config_invalid");
  CHECK(code_of("model = warped\nc = 0.5\nwarp_bump = 0, 0, 1, 0.05, 1\n").empty());
  CHECK(code_of("k = 1.5\n").empty());
}

TEST_CASE("config serializes every field in a fixed order") {
  Json a = to_json(RunConfig{}), b = to_json(RunConfig{});
  CHECK(dump_json(a) == dump_json(b));
  CHECK(a.contains("k"));
  CHECK(a.contains("fault"));
  CHECK(a.begin().key() == "command");
}

TEST_CASE("exit code classes") {
  CHECK(exit_code_for(ErrorClass::Validation) == 1);
  CHECK(exit_code_for(ErrorClass::Solver) == 2);
  CHECK(exit_code_for(ErrorClass::Precondition) == 3);
  CHECK(exit_code_for(ErrorClass::Io) == 4);
  CHECK(citation_for("k_outside_interval") == "k_surface_hypothesis_0_lt_k_lt_c");
  CHECK(citation_for("global_data_refused") == "nonexistence_sphere_minus_at_most_two_points");
  CHECK(citation_for("config_invalid").empty());
}

TEST_CASE("OBJ round trip is exact") {
  DiskMesh mesh = make_disk_mesh(DiskMeshKind::PlanarDiskSample, 1);
  std::vector<Vec3> pos;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    pos.emplace_back(mesh.reference()[v].x() / 3.0, mesh.reference()[v].y() * M_PI, 1.0 + 1e-13 * v);
  const std::string path = scratch("obj") + "/mesh.obj";
  write_obj(path, pos, mesh);
  ObjMesh back = read_obj(path);
  CHECK(back.positions == pos);
  CHECK(back.triangles == mesh.triangles());
}

TEST_CASE("vertex fields write NaN as null") {
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::PlanarDiskSample, 1));
  std::vector<Vec3> pos(mesh->num_vertices(), Vec3(0, 0, 1));
  ImmersedSurface s(mesh, pos, pos);
  std::vector<double> f(mesh->num_vertices(), 1.0);
  f[0] = NAN;
  Json j = vertex_fields(s, {{"extra", f}});
  CHECK(j["extra"][0].is_null());
  CHECK(j["extra"][1] == 1.0);
}

TEST_CASE("malformed JSON is an I/O error") {
  const std::string path = scratch("json") + "/bad.json";
  std::ofstream(path) << "{ not json";
  CHECK(io_code([&] { read_json(path); }) == "json_parse_error");
}

TEST_CASE("oracle reports are byte-identical") {
  RunConfig c;
  c.command = Command::Oracle;
  c.refinement = 2;
  c.out = scratch("oracle");
  CommandOutcome a = run_command(c), b = run_command(c);
  CHECK(a.exit_code == 0);
  CHECK(dump_json(a.report) == dump_json(b.report));
  Json disk = read_json(c.out + "/report.json");
  CHECK(dump_json(disk) == dump_json(a.report));
  CHECK(disk["status"] == "success");
  CHECK(disk["config"]["refinement"] == 2);
}

TEST_CASE("precondition violations exit with 3 and a citation") {
  RunConfig lens;
  lens.command = Command::SolveLens;
  lens.k = 1.5;
  lens.out = scratch("refuse");
  CommandOutcome o = execute(lens);
  CHECK(o.exit_code == 3);
  CHECK(o.report["error"]["code"] == "k_outside_interval");
  CHECK(o.report["error"]["citation"] == "k_surface_hypothesis_0_lt_k_lt_c");

  RunConfig closed = lens;
  closed.k = 0.25;
  closed.base = BaseKind::ClosedSphere;
  o = execute(closed);
  CHECK(o.exit_code == 3);
  CHECK(o.report["error"]["code"] == "closed_surface_refused");

  RunConfig plateau = lens;
  plateau.command = Command::SolvePlateau;
  plateau.k = 0.25;
  for (IdealKind kind : {IdealKind::FullSphere, IdealKind::SphereMinusOne, IdealKind::SphereMinusTwo}) {
    plateau.ideal = kind;
    o = execute(plateau);
    CHECK(o.exit_code == 3);
    CHECK(o.report["error"]["citation"] == "nonexistence_sphere_minus_at_most_two_points");
  }
}

TEST_CASE("configuration errors exit with 4") {
  RunConfig c;
  c.command = Command::Oracle;
  c.refinement = 7;
  c.out = scratch("badcfg");
  CHECK(execute(c).exit_code == 4);
}

TEST_CASE("lens command writes its artifacts") {
  RunConfig c;
  c.command = Command::SolveLens;
  c.refinement = 2;
  c.dump_matrix = true;
  c.out = scratch("lens");
  CommandOutcome o = run_command(c);
  REQUIRE(o.exit_code == 0);
  for (const char* f : {"report.json", "solution.obj", "solution_fields.json", "linear_system.mtx"})
    CHECK(fs::exists(fs::path(c.out) / f));
  Json fields = read_json(c.out + "/solution_fields.json");
  CHECK(fields["count"] == read_obj(c.out + "/solution.obj").positions.size());
}

TEST_CASE("validation at refinement 0 skips the order checks") {
  ValidationOptions opts;
  opts.refinement = 0;
  ValidationSummary s = run_validation_suite(opts);
  bool found = false;
  for (const auto& c : s.checks)
    if (c.name == "curvature_refinement_order") {
      found = true;
      CHECK(c.status == CheckStatus::Skipped);
      CHECK(c.detail == "insufficient levels");
    }
  CHECK(found);
  CHECK(refinement_levels(3) == std::vector<int>{1, 2, 3});
  CHECK(refinement_levels(6) == std::vector<int>{3, 4, 5, 6});
  CHECK(convergence_order({1, 2, 3}, {0.1, 0.025, 0.00625}) == doctest::Approx(2.0));
}

TEST_CASE("Riccati rate on the equidistant family") {
  // kappa(r) = tanh^2 r along the normal flow of an equidistant surface.
  const double r = 0.6, t = std::tanh(r);
  CHECK(riccati_kappa_rate(t, t, -1.0, -1.0) == doctest::Approx(2.0 * t * (1 - t * t)));
}
