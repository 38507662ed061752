#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "ksurf/continuation.hpp"
#include "ksurf/plateau.hpp"

namespace ksurf {

using Json = nlohmann::ordered_json;

// Chart coordinates with 17 significant digits, 1-based faces. Geometry only.
std::string format_obj(const std::vector<Vec3>& positions, const DiskMesh& mesh);
void write_obj(const std::string& path, const std::vector<Vec3>& positions, const DiskMesh& mesh);

struct ObjMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;  // 0-based
};
ObjMesh read_obj(const std::string& path);

// Scalar sidecar: one array per field, indexed by vertex id. NaN is written
// as null.
using NamedField = std::pair<std::string, std::vector<double>>;
Json vertex_fields(const ImmersedSurface& surf, const std::vector<NamedField>& extra = {});

Json to_json(const Vec3& v);
Json to_json(const SolveReport& r);
Json to_json(const ExhaustionReport& r);
Json to_json(const MaxPrincipleCertificate& c);

// Two-space indent and a trailing newline; key order is insertion order so
// identical inputs give identical bytes.
std::string dump_json(const Json& j);
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

// Creates the directory (and parents). Throws IoError.
void ensure_directory(const std::string& path);

}  // namespace ksurf
