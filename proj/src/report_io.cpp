#include "ksurf/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

Json to_json(const IdealPoint& p) {
  if (p.is_infinity()) return "infinity";
  return Json::array({p.plane_point().x(), p.plane_point().y()});
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("io_open_failed", "cannot open " + path);
  os << text;
  if (!os) throw IoError("io_write_failed", "failed writing " + path);
}

}  // namespace

std::string format_obj(const std::vector<Vec3>& positions, const DiskMesh& mesh) {
  std::string out = "# half-space chart coordinates (x, y, z)\n";
  char buf[128];
  for (const auto& p : positions) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  for (const auto& t : mesh.triangles()) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

void write_obj(const std::string& path, const std::vector<Vec3>& positions, const DiskMesh& mesh) {
  write_text(path, format_obj(positions, mesh));
}

ObjMesh read_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("io_open_failed", "cannot open " + path);
  ObjMesh m;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw IoError("obj_parse_error", "bad vertex line: " + line);
      m.positions.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> t;
      for (int& i : t) {
        std::string tok;
        if (!(ls >> tok)) throw IoError("obj_parse_error", "bad face line: " + line);
        i = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      m.triangles.push_back(t);
    }
  }
  return m;
}

Json vertex_fields(const ImmersedSurface& surf, const std::vector<NamedField>& extra) {
  Json j;
  j["count"] = surf.num_vertices();
  std::vector<double> boundary;
  for (int v = 0; v < surf.num_vertices(); ++v) boundary.push_back(surf.mesh().is_boundary(v) ? 1.0 : 0.0);
  j["boundary"] = numbers(boundary);
  Json normals = Json::array();
  for (const auto& n : surf.normals()) normals.push_back(to_json(n));
  j["normal"] = normals;
  if (surf.has_forms()) {
    std::vector<double> kappa, mean, k1, k2;
    for (const auto& f : surf.forms()) {
      kappa.push_back(f.kappa);
      mean.push_back(f.mean);
      k1.push_back(f.principal[0]);
      k2.push_back(f.principal[1]);
    }
    j["kappa"] = numbers(kappa);
    j["mean_curvature"] = numbers(mean);
    j["principal_min"] = numbers(k1);
    j["principal_max"] = numbers(k2);
  }
  for (const auto& [name, values] : extra) {
    if (static_cast<int>(values.size()) != surf.num_vertices())
      throw IoError("field_size_mismatch", "field " + name + " does not match the mesh");
    j[name] = numbers(values);
  }
  return j;
}

Json to_json(const Vec3& v) { return Json::array({number(v.x()), number(v.y()), number(v.z())}); }

Json to_json(const MaxPrincipleCertificate& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["positive_offdiagonals"] = c.positive_offdiagonals;
  j["min_inverse_entry"] = number(c.min_inverse_entry);
  j["min_boundary_response"] = number(c.min_boundary_response);
  j["witnesses"] = c.witnesses;
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["converged"] = r.converged;
  j["failure"] = r.failure;
  j["failure_message"] = r.failure_message;
  j["iterations"] = r.iterations;
  j["residual_history"] = numbers(r.residual_history);
  j["residual_final"] = number(r.residual_final);
  j["min_interior_lambda"] = number(r.min_interior_lambda);
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    Json st;
    st["t"] = number(s.t);
    st["k"] = number(s.k);
    st["iterations"] = s.iterations;
    st["residual"] = number(s.residual);
    st["converged"] = s.converged;
    st["domination"] = s.domination;
    st["domination_gap"] = number(s.domination_gap);
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["stencil"] = r.stencil;
  j["certificate"] = r.certificate;
  Json d;
  d["status"] = to_string(r.degeneracy.status);
  d["max_mean"] = number(r.degeneracy.max_mean);
  d["median_anisotropy"] = number(r.degeneracy.median_anisotropy);
  d["tube_fraction"] = number(r.degeneracy.tube_fraction);
  if (r.degeneracy.status == DegeneracyStatus::SuspectedTube) {
    d["axis"] = Json::array({to_json(r.degeneracy.axis_a), to_json(r.degeneracy.axis_b)});
    d["axis_residual"] = number(r.degeneracy.axis_residual);
  }
  j["degeneracy"] = d;
  Json q;
  q["min_edge"] = number(r.mesh_quality.min_edge);
  q["max_edge"] = number(r.mesh_quality.max_edge);
  q["min_angle"] = number(r.mesh_quality.min_angle);
  j["mesh_quality"] = q;
  return j;
}

Json to_json(const ExhaustionReport& r) {
  Json j;
  j["converged"] = r.converged;
  j["failure"] = r.failure;
  j["failure_message"] = r.failure_message;
  j["epsilon"] = number(r.epsilon);
  j["alpha0"] = number(r.alpha0);
  j["delta_bound"] = number(r.delta_bound);
  j["max_height"] = number(r.max_height);
  j["bounded"] = r.bounded;
  j["monotone"] = r.monotone;
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    Json st;
    st["index"] = s.index;
    st["radius"] = number(s.radius);
    st["iterations"] = s.iterations;
    st["residual"] = number(s.residual);
    st["probe_change"] = number(s.probe_change);
    st["min_increment"] = number(s.min_increment);
    st["certificate"] = s.certificate;
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["probe_vertices"] = r.probe_vertices;
  Json trace = Json::array();
  for (const auto& row : r.trace) trace.push_back(numbers(row));
  j["trace"] = trace;
  if (r.closed_form_error) j["closed_form_error"] = number(*r.closed_form_error);
  if (r.solution_kappa_error) j["solution_kappa_error"] = number(*r.solution_kappa_error);
  if (r.oracle_kappa_error) j["oracle_kappa_error"] = number(*r.oracle_kappa_error);
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const Json& j) { write_text(path, dump_json(j)); }

Json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("io_open_failed", "cannot open " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw IoError("json_parse_error", path + ": " + e.what());
  }
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec || !std::filesystem::is_directory(path))
    throw IoError("io_mkdir_failed", "cannot create directory " + path);
}

}  // namespace ksurf
