#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksurf/ambient.hpp"
#include "ksurf/continuation.hpp"
#include "ksurf/plateau.hpp"
#include "ksurf/report_io.hpp"

namespace ksurf {

enum class Command { Oracle, SolveLens, SolvePlateau, Validate };
std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

enum class BaseKind { SphereCap, ClosedSphere };
enum class IdealKind { Disk, FullSphere, SphereMinusOne, SphereMinusTwo };

// Config file grammar, one entry per line:
//
//   # comment
//   key = value
//
// Keys are lowercase identifiers. `fourier` and `warp_bump` may repeat; any
// other repeated or unknown key is an error. Booleans are true/false.
//
//   model = hyperbolic | warped      c = 1
//   warp_bump = x, y, z, amplitude, width
//   k = 0.25
//   base = sphere_cap | closed_sphere
//   cap_radius = 1   cap_angle = 0.7   base_perturbation = 0
//   schedule = k_ramp | contracting_disk | equidistant_seed
//   schedule_start = 0.1   schedule_stages = 4
//   ideal = disk | full_sphere | sphere_minus_1 | sphere_minus_2
//   alpha = 1.5707963267948966   gauss_image_inside = true
//   fourier = m, cos, sin
//   refinement = 3   tol = 1e-8   plateau_tol = 1e-6   max_stages = 40
//   max_iterations = 30
//   out = out   seed = 1   threads = 1   dump_matrix = false
//   fault = none | flip_curvature_sign
struct RunConfig {
  Command command = Command::Validate;

  std::string model = "hyperbolic";
  double c = 1.0;
  std::vector<WarpBump> warp_bumps;

  double k = 0.25;
  BaseKind base = BaseKind::SphereCap;
  double cap_radius = 1.0;
  double cap_angle = 0.7;
  double base_perturbation = 0.0;  // amplitude of a seeded smooth radial field

  ScheduleKind schedule = ScheduleKind::KRamp;
  // k_ramp: first k; contracting_disk: first t.
  double schedule_start = 0.1;
  int schedule_stages = 4;

  IdealKind ideal = IdealKind::Disk;
  double alpha = M_PI / 2;
  bool gauss_image_inside = true;
  std::vector<FourierTerm> fourier;

  int refinement = 3;
  double tol = 1e-8;
  double plateau_tol = 1e-6;
  int max_stages = 40;
  int max_iterations = 30;

  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool dump_matrix = false;
  FaultInjection fault = FaultInjection::None;
};

// Throws IoError("config_invalid") with the offending line number.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

struct ConfigOverrides {
  std::optional<int> refinement;
  std::optional<double> k;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<bool> dump_matrix;
};

RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& o);

// Range checks: refinement in [0, 6], tolerances > 0, counts >= 1 and
// c > 0 throw IoError("config_invalid"). The curvature hypothesis 0 < k < c
// is a precondition of the problem and is checked by the commands.
void validate_config(const RunConfig& cfg);

// Every field, defaults included.
Json to_json(const RunConfig& cfg);

AmbientModel make_model(const RunConfig& cfg);

}  // namespace ksurf
