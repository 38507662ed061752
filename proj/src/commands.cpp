#include "ksurf/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "ksurf/continuation.hpp"
#include "ksurf/linearized.hpp"
#include "ksurf/parametrized.hpp"
#include "ksurf/plateau.hpp"
#include "ksurf/validation.hpp"

namespace ksurf {

namespace {

Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Json error_json(const KsurfError& e) {
  Json j;
  j["code"] = e.code();
  j["message"] = e.what();
  if (const auto* p = dynamic_cast<const PreconditionError*>(&e)) {
    j["condition"] = p->condition();
    j["citation"] = citation_for(e.code());
    if (!p->witnesses().empty()) j["witnesses"] = p->witnesses();
  }
  return j;
}

CommandOutcome failure(int code, Json error, Json result = Json::object()) {
  CommandOutcome o;
  o.exit_code = code;
  o.report["error"] = std::move(error);
  o.report["result"] = std::move(result);
  o.summary = status_for_exit_code(code) + ": " + o.report["error"].value("code", std::string()) + ": " +
              o.report["error"].value("message", std::string()) + "\n";
  return o;
}

std::shared_ptr<const SurfacePatch> base_patch(const RunConfig& cfg, const AmbientModel& model) {
  SmoothField pert;
  if (cfg.base_perturbation > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    pert = SmoothField::random(rng, 3, cfg.base_perturbation, 2.0);
  }
  return std::make_shared<SphereCapPatch>(model, Vec3(0, 0, 1), cfg.cap_radius, cfg.cap_angle, Vec3::UnitZ(),
                                          std::move(pert));
}

// Positions are irrelevant: validate_problem refuses the empty boundary first.
LensProblem closed_problem(const RunConfig& cfg, const AmbientModel& model) {
  auto mesh = std::make_shared<const DiskMesh>(make_closed_sphere_mesh(std::max(cfg.refinement, 1)));
  std::vector<Vec3> pos(mesh->num_vertices(), Vec3(0, 0, 1)), nor(mesh->num_vertices(), Vec3(0, 0, 1));
  return LensProblem{.model = model, .base = ImmersedSurface(mesh, pos, nor), .k_target = cfg.k, .margin = 1e-3, .barrier_base = false, .patch = nullptr};
}

HomotopySchedule schedule_for(const RunConfig& cfg) {
  switch (cfg.schedule) {
    case ScheduleKind::ContractingDisk: return HomotopySchedule::contracting_disk(cfg.schedule_start, cfg.k, cfg.schedule_stages);
    case ScheduleKind::EquidistantSeed: return HomotopySchedule::equidistant_seed(cfg.k);
    case ScheduleKind::KRamp: break;
  }
  return HomotopySchedule::k_ramp(std::min(cfg.schedule_start, cfg.k), cfg.k, cfg.schedule_stages);
}

SolverConfig solver_for(const RunConfig& cfg) {
  SolverConfig s;
  s.tol = cfg.tol;
  s.max_iterations = cfg.max_iterations;
  return s;
}

std::vector<double> zeroth_order_field(const AmbientModel& model, const ImmersedSurface& s) {
  try {
    return zeroth_order_certificate(model, s).J;
  } catch (const PreconditionError&) {
    return std::vector<double>(s.num_vertices(), NAN);
  }
}

// Refits the embedded positions from scratch; no solver state is reused.
double recomputed_residual(const AmbientModel& model, const ImmersedSurface& s, double k) {
  ImmersedSurface fresh =
      fit_fundamental_forms(model, ImmersedSurface(s.mesh_ptr(), s.positions(), s.normals()), s.fit_options());
  double m = 0.0;
  for (int v : fresh.mesh().interior_vertices()) m = std::max(m, std::abs(fresh.forms()[v].kappa - k));
  return m;
}

Json closed_form_table(const RunConfig& cfg, const AmbientModel& model, std::string* text) {
  Json rows = Json::array();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-26s %14s %14s %12s\n", "family", "closed_form", "measured", "rel_error");
  *text += buf;
  for (const OracleRow& r : curvature_oracle_table(model, cfg.refinement)) {
    Json row;
    row["family"] = r.family;
    row["closed_form"] = num(r.exact);
    row["measured"] = num(r.measured);
    row["rel_error"] = num(std::abs(r.measured - r.exact) / r.exact);
    row["max_interior_rel_error"] = num(r.max_rel_error);
    rows.push_back(row);
    std::snprintf(buf, sizeof buf, "%-26s %14.10f %14.10f %12.3e\n", r.family.c_str(), r.exact, r.measured,
                  std::abs(r.measured - r.exact) / r.exact);
    *text += buf;
  }
  return rows;
}

}  // namespace

int exit_code_for(ErrorClass c) { return static_cast<int>(c); }

std::string status_for_exit_code(int code) {
  switch (code) {
    case 0: return "success";
    case 1: return "validation_failure";
    case 2: return "solver_failure";
    case 3: return "precondition_violation";
    case 4: return "io_or_config_error";
  }
  return "unknown";
}

std::string citation_for(const std::string& code) {
  if (code == "global_data_refused" || code == "closed_surface_refused")
    return "nonexistence_sphere_minus_at_most_two_points";
  if (code == "k_outside_interval" || code == "kappa_outside_interval") return "k_surface_hypothesis_0_lt_k_lt_c";
  if (code == "base_not_convex" || code == "base_not_disk") return "lens_existence_convex_disk_base";
  if (code == "curvature_bound_not_certified" || code == "invalid_curvature_bound")
    return "ambient_sectional_curvature_at_most_minus_c";
  if (code == "alpha_out_of_range" || code == "perturbation_too_large" || code == "invalid_perturbation")
    return "ideal_boundary_round_disk_data";
  return "";
}

CommandOutcome cmd_oracle(const RunConfig& cfg) {
  AmbientModel model = make_model(cfg);
  if (!model.closed_form()) throw IoError("config_invalid", "the oracle table needs model = hyperbolic");
  CommandOutcome o;
  std::string text;
  o.report["result"]["refinement"] = cfg.refinement;
  o.report["result"]["rows"] = closed_form_table(cfg, model, &text);
  o.summary = text;
  return o;
}

CommandOutcome cmd_solve_lens(const RunConfig& cfg) {
  const AmbientModel model = make_model(cfg);
  if (cfg.base == BaseKind::ClosedSphere) validate_problem(closed_problem(cfg, model));
  const double c = model.curvature_upper_bound();
  if (!(cfg.k > 0.0 && cfg.k < c))
    throw PreconditionError("k_outside_interval", "0 < k < c",
                            "target curvature " + std::to_string(cfg.k) + " is outside (0, " + std::to_string(c) + ")");
  auto mesh = std::make_shared<const DiskMesh>(make_disk_mesh(DiskMeshKind::GeodesicPolarCap, cfg.refinement));
  LensProblem prob = make_lens_problem(model, base_patch(cfg, model), mesh, cfg.k);
  validate_problem(prob);

  SolveResult res = homotopy_solve(prob, schedule_for(cfg), solver_for(cfg));
  const SolveReport& rep = res.report;
  Json result;
  result["solve"] = to_json(rep);
  Json audit;
  audit["recomputed_residual"] = num(recomputed_residual(model, res.surface, cfg.k));
  InverseFunctionReport inv = inverse_function(model, res.graph, res.surface);
  audit["lipschitz_ratio"] = num(inv.lipschitz_ratio);
  BallInclusion ball = boundary_ball_inclusion(model, res.surface, 1e-6);
  audit["ball_inclusion"] = ball.holds;
  audit["ball_max_excess"] = num(ball.max_excess);
  result["audit"] = audit;

  ensure_directory(cfg.out);
  CommandOutcome o;
  write_obj(join(cfg.out, "solution.obj"), res.surface.positions(), res.surface.mesh());
  write_json(join(cfg.out, "solution_fields.json"),
             vertex_fields(res.surface, {{"lambda", res.graph.lambda},
                                         {"mu", inv.mu},
                                         {"J", zeroth_order_field(model, res.surface)}}));
  o.artifacts = {"solution.obj", "solution_fields.json"};
  if (cfg.dump_matrix) {
    OperatorAssembly A = assemble_certified_L(model, res.surface);
    write_matrix_market(A, join(cfg.out, "linear_system.mtx"));
    o.artifacts.push_back("linear_system.mtx");
    result["matrix_stencil"] = to_string(A.stencil);
  }
  const bool ok = rep.converged && rep.residual_final <= cfg.tol;
  char buf[200];
  std::snprintf(buf, sizeof buf, "lens k=%.6g: %s, residual %.3e after %d iterations (%zu stages)\n", cfg.k,
                ok ? "converged" : "not converged", rep.residual_final, rep.iterations, rep.stages.size());
  o.summary = buf;
  o.report["result"] = result;
  if (!ok) {
    o.exit_code = 2;
    o.report["error"] = {{"code", rep.failure.empty() ? "residual_above_tol" : rep.failure},
                         {"message", rep.failure.empty() ? "final residual exceeds tol" : rep.failure_message}};
  }
  return o;
}

CommandOutcome cmd_solve_plateau(const RunConfig& cfg) {
  switch (cfg.ideal) {
    case IdealKind::FullSphere: throw_refusal(reject_global_data(GlobalDataKind::FullSphere));
    case IdealKind::SphereMinusOne: throw_refusal(reject_global_data(GlobalDataKind::SphereMinusOne));
    case IdealKind::SphereMinusTwo: throw_refusal(reject_global_data(GlobalDataKind::SphereMinusTwo));
    case IdealKind::Disk: break;
  }
  const AmbientModel model = make_model(cfg);
  IdealDiskData data;
  data.alpha = cfg.alpha;
  data.perturbation = cfg.fourier;
  data.gauss_image_inside = cfg.gauss_image_inside;
  ExhaustionConfig ec;
  ec.refinement = cfg.refinement;
  ec.tol = cfg.plateau_tol;
  ec.max_stages = cfg.max_stages;
  ec.solver = solver_for(cfg);
  ExhaustionResult res = exhaustion_solve(model, data, cfg.k, ec);
  const ExhaustionReport& rep = res.report;

  Json result;
  result["exhaustion"] = to_json(rep);
  CommandOutcome o;
  if (res.lens) {
    const ImmersedSurface& barrier = res.lens->graph.base;
    double kmin = INFINITY;
    for (int v : barrier.mesh().interior_vertices()) kmin = std::min(kmin, barrier.forms()[v].kappa);
    result["barrier_min_interior_kappa"] = num(kmin);
    result["final_stage"] = to_json(res.lens->report);
    ensure_directory(cfg.out);
    write_obj(join(cfg.out, "plateau.obj"), res.lens->surface.positions(), res.lens->surface.mesh());
    write_json(join(cfg.out, "plateau_fields.json"), vertex_fields(res.lens->surface, {{"lambda", res.lens->graph.lambda}}));
    write_obj(join(cfg.out, "barrier.obj"), barrier.positions(), barrier.mesh());
    o.artifacts = {"plateau.obj", "plateau_fields.json", "barrier.obj"};
  }
  const bool ok = rep.converged && rep.monotone && rep.bounded;
  char buf[240];
  std::snprintf(buf, sizeof buf, "plateau alpha=%.6g k=%.6g: %s after %zu stages, max height %.6f (bound %.6f)\n",
                cfg.alpha, cfg.k, ok ? "converged" : "failed", rep.stages.size(), rep.max_height, rep.delta_bound);
  o.summary = buf;
  if (rep.closed_form_error) {
    std::snprintf(buf, sizeof buf, "closed-form position error %.3e\n", *rep.closed_form_error);
    o.summary += buf;
  }
  o.report["result"] = result;
  if (!ok) {
    o.exit_code = 2;
    std::string code = rep.failure.empty() ? "heights_unbounded" : rep.failure;
    o.report["error"] = {{"code", code},
                         {"message", rep.failure.empty() ? "probe heights exceed the cone barrier bound" : rep.failure_message}};
  }
  return o;
}

CommandOutcome cmd_validate(const RunConfig& cfg) {
  ValidationOptions vo;
  vo.refinement = cfg.refinement;
  vo.seed = cfg.seed;
  vo.fault = cfg.fault;
  ValidationSummary sum = run_validation_suite(vo);

  // Command-level invariants.
  {
    RunConfig oc = cfg;
    oc.command = Command::Oracle;
    oc.fault = FaultInjection::None;
    const std::string a = dump_json(execute(oc).report), b = dump_json(execute(oc).report);
    sum.checks.push_back({"cli-harness", "report_determinism", a == b ? CheckStatus::Pass : CheckStatus::Fail, "",
                          Json{{"bytes", a.size()}}});
  }
  {
    RunConfig lens = cfg;
    lens.command = Command::SolveLens;
    lens.k = 1.5;
    RunConfig plat = cfg;
    plat.command = Command::SolvePlateau;
    plat.ideal = IdealKind::SphereMinusTwo;
    RunConfig bad = cfg;
    bad.refinement = 7;
    const int e1 = execute(lens).exit_code, e2 = execute(plat).exit_code, e3 = execute(bad).exit_code;
    const bool classes = exit_code_for(ErrorClass::Validation) == 1 && exit_code_for(ErrorClass::Solver) == 2 &&
                         exit_code_for(ErrorClass::Precondition) == 3 && exit_code_for(ErrorClass::Io) == 4;
    sum.checks.push_back({"cli-harness", "exit_code_contract",
                          classes && e1 == 3 && e2 == 3 && e3 == 4 ? CheckStatus::Pass : CheckStatus::Fail, "",
                          Json{{"k_above_c", e1}, {"sphere_minus_2", e2}, {"refinement_7", e3}}});
  }

  CommandOutcome o;
  o.report["result"] = to_json(sum);
  o.exit_code = sum.passed() ? 0 : 1;
  std::string text;
  for (const auto& c : sum.checks) {
    text += "[" + to_string(c.status) + "] " + c.module + "/" + c.name;
    if (!c.detail.empty()) text += " (" + c.detail + ")";
    text += "\n";
  }
  text += std::to_string(sum.count(CheckStatus::Pass)) + " passed, " + std::to_string(sum.count(CheckStatus::Fail)) +
          " failed, " + std::to_string(sum.count(CheckStatus::Skipped)) + " skipped\n";
  o.summary = text;
  if (!sum.passed()) o.report["error"] = {{"code", "validation_failed"}, {"message", "invariant checks failed"}};
  return o;
}

CommandOutcome execute(const RunConfig& cfg) {
  CommandOutcome o;
  try {
    validate_config(cfg);
    switch (cfg.command) {
      case Command::Oracle: o = cmd_oracle(cfg); break;
      case Command::SolveLens: o = cmd_solve_lens(cfg); break;
      case Command::SolvePlateau: o = cmd_solve_plateau(cfg); break;
      case Command::Validate: o = cmd_validate(cfg); break;
    }
  } catch (const KsurfError& e) {
    o = failure(exit_code_for(e.error_class()), error_json(e));
  } catch (const std::exception& e) {
    o = failure(2, Json{{"code", "unexpected_error"}, {"message", e.what()}});
  }
  Json report;
  report["tool"] = "ksurf";
  report["command"] = to_string(cfg.command);
  report["exit_code"] = o.exit_code;
  report["status"] = status_for_exit_code(o.exit_code);
  report["config"] = to_json(cfg);
  if (o.report.contains("error")) report["error"] = o.report["error"];
  report["result"] = o.report.contains("result") ? o.report["result"] : Json::object();
  report["artifacts"] = o.artifacts;
  o.report = std::move(report);
  return o;
}

CommandOutcome run_command(const RunConfig& cfg) {
  CommandOutcome o = execute(cfg);
  try {
    ensure_directory(cfg.out);
    write_json(join(cfg.out, "report.json"), o.report);
  } catch (const KsurfError& e) {
    o.exit_code = 4;
    o.summary += std::string("cannot write report: ") + e.what() + "\n";
  }
  return o;
}

}  // namespace ksurf
