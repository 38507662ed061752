#include "ksurf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

[[noreturn]] void invalid(int line, const std::string& msg) {
  throw IoError("config_invalid", line > 0 ? "config line " + std::to_string(line) + ": " + msg : msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, int line) {
  const std::string t = trim(s);
  double x = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty() || !std::isfinite(x))
    invalid(line, "expected a number, got '" + t + "'");
  return x;
}

template <class Int>
Int parse_int(const std::string& s, int line) {
  const std::string t = trim(s);
  Int x = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    invalid(line, "expected an integer, got '" + t + "'");
  return x;
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  invalid(line, "expected true or false, got '" + s + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string schedule_name(ScheduleKind k) { return to_string(k); }

std::string ideal_name(IdealKind k) {
  switch (k) {
    case IdealKind::Disk: return "disk";
    case IdealKind::FullSphere: return "full_sphere";
    case IdealKind::SphereMinusOne: return "sphere_minus_1";
    case IdealKind::SphereMinusTwo: return "sphere_minus_2";
  }
  return "disk";
}

std::string fault_name(FaultInjection f) {
  return f == FaultInjection::FlipCurvatureSign ? "flip_curvature_sign" : "none";
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  if (key == "model") {
    if (value != "hyperbolic" && value != "warped") invalid(line, "model must be hyperbolic or warped");
    cfg.model = value;
  } else if (key == "c") {
    cfg.c = parse_double(value, line);
  } else if (key == "warp_bump") {
    auto parts = split_commas(value);
    if (parts.size() != 5) invalid(line, "warp_bump needs x, y, z, amplitude, width");
    WarpBump b;
    b.center = Vec3(parse_double(parts[0], line), parse_double(parts[1], line), parse_double(parts[2], line));
    b.amplitude = parse_double(parts[3], line);
    b.width = parse_double(parts[4], line);
    cfg.warp_bumps.push_back(b);
  } else if (key == "k") {
    cfg.k = parse_double(value, line);
  } else if (key == "base") {
    if (value == "sphere_cap") cfg.base = BaseKind::SphereCap;
    else if (value == "closed_sphere") cfg.base = BaseKind::ClosedSphere;
    else invalid(line, "base must be sphere_cap or closed_sphere");
  } else if (key == "cap_radius") {
    cfg.cap_radius = parse_double(value, line);
  } else if (key == "cap_angle") {
    cfg.cap_angle = parse_double(value, line);
  } else if (key == "base_perturbation") {
    cfg.base_perturbation = parse_double(value, line);
  } else if (key == "schedule") {
    if (value == "k_ramp") cfg.schedule = ScheduleKind::KRamp;
    else if (value == "contracting_disk") cfg.schedule = ScheduleKind::ContractingDisk;
    else if (value == "equidistant_seed") cfg.schedule = ScheduleKind::EquidistantSeed;
    else invalid(line, "unknown schedule '" + value + "'");
  } else if (key == "schedule_start") {
    cfg.schedule_start = parse_double(value, line);
  } else if (key == "schedule_stages") {
    cfg.schedule_stages = parse_int<int>(value, line);
  } else if (key == "ideal") {
    if (value == "disk") cfg.ideal = IdealKind::Disk;
    else if (value == "full_sphere") cfg.ideal = IdealKind::FullSphere;
    else if (value == "sphere_minus_1") cfg.ideal = IdealKind::SphereMinusOne;
    else if (value == "sphere_minus_2") cfg.ideal = IdealKind::SphereMinusTwo;
    else invalid(line, "unknown ideal data '" + value + "'");
  } else if (key == "alpha") {
    cfg.alpha = parse_double(value, line);
  } else if (key == "gauss_image_inside") {
    cfg.gauss_image_inside = parse_bool(value, line);
  } else if (key == "fourier") {
    auto parts = split_commas(value);
    if (parts.size() != 3) invalid(line, "fourier needs m, cos, sin");
    cfg.fourier.push_back({parse_int<int>(parts[0], line), parse_double(parts[1], line), parse_double(parts[2], line)});
  } else if (key == "refinement") {
    cfg.refinement = parse_int<int>(value, line);
  } else if (key == "tol") {
    cfg.tol = parse_double(value, line);
  } else if (key == "plateau_tol") {
    cfg.plateau_tol = parse_double(value, line);
  } else if (key == "max_stages") {
    cfg.max_stages = parse_int<int>(value, line);
  } else if (key == "max_iterations") {
    cfg.max_iterations = parse_int<int>(value, line);
  } else if (key == "out") {
    if (value.empty()) invalid(line, "out must not be empty");
    cfg.out = value;
  } else if (key == "seed") {
    cfg.seed = parse_int<std::uint64_t>(value, line);
  } else if (key == "threads") {
    cfg.threads = parse_int<int>(value, line);
  } else if (key == "dump_matrix") {
    cfg.dump_matrix = parse_bool(value, line);
  } else if (key == "fault") {
    if (value == "none") cfg.fault = FaultInjection::None;
    else if (value == "flip_curvature_sign") cfg.fault = FaultInjection::FlipCurvatureSign;
    else invalid(line, "unknown fault '" + value + "'");
  } else {
    invalid(line, "unknown key '" + key + "'");
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Oracle: return "oracle";
    case Command::SolveLens: return "solve-lens";
    case Command::SolvePlateau: return "solve-plateau";
    case Command::Validate: return "validate";
  }
  return "validate";
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::Oracle, Command::SolveLens, Command::SolvePlateau, Command::Validate})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

RunConfig parse_config_text(const std::string& text, RunConfig cfg) {
  static const std::set<std::string> repeatable = {"fourier", "warp_bump"};
  std::set<std::string> seen;
  bool cleared_fourier = false, cleared_bumps = false;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) invalid(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") != std::string::npos)
      invalid(line, "bad key '" + key + "'");
    if (!repeatable.count(key) && !seen.insert(key).second) invalid(line, "duplicate key '" + key + "'");
    // A file listing modes replaces the inherited list.
    if (key == "fourier" && !cleared_fourier) cfg.fourier.clear(), cleared_fourier = true;
    if (key == "warp_bump" && !cleared_bumps) cfg.warp_bumps.clear(), cleared_bumps = true;
    set_key(cfg, key, value, line);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw IoError("config_unreadable", "cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& o) {
  if (o.refinement) cfg.refinement = *o.refinement;
  if (o.k) cfg.k = *o.k;
  if (o.tol) cfg.tol = *o.tol;
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.dump_matrix) cfg.dump_matrix = *o.dump_matrix;
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.refinement < 0 || cfg.refinement > 6) invalid(0, "refinement must lie in [0, 6]");
  if (!(cfg.tol > 0.0) || !(cfg.plateau_tol > 0.0)) invalid(0, "tolerances must be positive");
  if (!(cfg.c > 0.0)) invalid(0, "c must be positive");
  if (cfg.model == "hyperbolic" && cfg.c != 1.0) invalid(0, "the hyperbolic model has c = 1");
  if (cfg.model == "hyperbolic" && !cfg.warp_bumps.empty()) invalid(0, "warp_bump needs model = warped");
  if (!std::isfinite(cfg.k)) invalid(0, "k must be finite");
  if (cfg.schedule_stages < 1 || cfg.max_stages < 1 || cfg.max_iterations < 1)
    invalid(0, "stage and iteration counts must be at least 1");
  if (cfg.threads < 1) invalid(0, "threads must be at least 1");
  if (!(cfg.cap_radius > 0.0) || !(cfg.cap_angle > 0.0 && cfg.cap_angle < M_PI))
    invalid(0, "cap_radius must be positive and cap_angle in (0, pi)");
  if (!(cfg.base_perturbation >= 0.0)) invalid(0, "base_perturbation must be nonnegative");
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["command"] = to_string(cfg.command);
  j["model"] = cfg.model;
  j["c"] = cfg.c;
  Json bumps = Json::array();
  for (const auto& b : cfg.warp_bumps)
    bumps.push_back(Json::array({b.center.x(), b.center.y(), b.center.z(), b.amplitude, b.width}));
  j["warp_bump"] = bumps;
  j["k"] = cfg.k;
  j["base"] = cfg.base == BaseKind::SphereCap ? "sphere_cap" : "closed_sphere";
  j["cap_radius"] = cfg.cap_radius;
  j["cap_angle"] = cfg.cap_angle;
  j["base_perturbation"] = cfg.base_perturbation;
  j["schedule"] = schedule_name(cfg.schedule);
  j["schedule_start"] = cfg.schedule_start;
  j["schedule_stages"] = cfg.schedule_stages;
  j["ideal"] = ideal_name(cfg.ideal);
  j["alpha"] = cfg.alpha;
  j["gauss_image_inside"] = cfg.gauss_image_inside;
  Json modes = Json::array();
  for (const auto& t : cfg.fourier) modes.push_back(Json::array({t.m, t.cos_coeff, t.sin_coeff}));
  j["fourier"] = modes;
  j["refinement"] = cfg.refinement;
  j["tol"] = cfg.tol;
  j["plateau_tol"] = cfg.plateau_tol;
  j["max_stages"] = cfg.max_stages;
  j["max_iterations"] = cfg.max_iterations;
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["dump_matrix"] = cfg.dump_matrix;
  j["fault"] = fault_name(cfg.fault);
  return j;
}

AmbientModel make_model(const RunConfig& cfg) {
  AmbientModel m = cfg.model == "warped" ? AmbientModel::warped(cfg.warp_bumps, cfg.c) : AmbientModel::hyperbolic();
  return m.with_fault(cfg.fault);
}

}  // namespace ksurf
