#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ksurf/diagnostics.hpp"
#include "ksurf/linearized.hpp"
#include "ksurf/parametrized.hpp"
#include "ksurf/radial_graph.hpp"

namespace ksurf {

struct LensProblem {
  AmbientModel model = AmbientModel::hyperbolic();
  ImmersedSurface base;  // fitted forms required
  double k_target = 0.25;
  double margin = 1e-3;  // base must satisfy kappa > c + margin
  // Exhaustion barriers only need kappa > k_target + margin, on interior
  // vertices.
  bool barrier_base = false;
  // Parametrization of the base over the reference disk; required by
  // contracting-disk schedules.
  std::shared_ptr<const SurfacePatch> patch;
};

// Throws PreconditionError: closed_surface_refused, k_outside_interval,
// base_not_disk, invalid_margin, base_not_convex.
void validate_problem(const LensProblem& p);

// Builds and fits the base from a patch sampled on `mesh`.
LensProblem make_lens_problem(const AmbientModel& model, std::shared_ptr<const SurfacePatch> patch,
                              std::shared_ptr<const DiskMesh> mesh, double k_target,
                              const FitOptions& fit = {}, double margin = 1e-3);

struct SolverConfig {
  double tol = 1e-8;
  int max_iterations = 30;
  double fd_step = 1e-6;  // central differences for Jacobian columns
  double kappa_min = 1e-4;
  double kappa_margin = 1e-6;  // accepted steps keep kappa < c - kappa_margin
  int max_halvings = 12;
  bool certify_max_principle = true;
};

struct StageRecord {
  double t = 1.0;
  double k = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string domination = "n/a";  // against the previous accepted stage
  double domination_gap = 0.0;     // min of (dominating - dominated)
};

struct SolveReport {
  bool converged = false;
  std::string failure;  // error code when not converged
  std::string failure_message;
  int iterations = 0;  // Newton iterations of the final solve
  std::vector<double> residual_history;
  double residual_final = 0.0;  // sup over interior vertices of |kappa - k|
  double min_interior_lambda = 0.0;
  std::vector<StageRecord> stages;
  std::string stencil = "fit";
  std::string certificate = "not_checked";
  DegeneracyReport degeneracy;
  MeshQuality mesh_quality;
};

struct SolveResult {
  RadialGraph graph;
  ImmersedSurface surface;  // embedded graph with fitted forms
  SolveReport report;
};

// Throws SolverError (ellipticity_lost, line_search_stall, max_iterations,
// lens_detached, discrete_maximum_principle_violated) or PreconditionError.
SolveResult newton_solve(const LensProblem& problem, const RadialGraph& seed, const SolverConfig& config = {});

enum class ScheduleKind { ContractingDisk, KRamp, EquidistantSeed };
std::string to_string(ScheduleKind k);

struct HomotopySchedule {
  ScheduleKind kind = ScheduleKind::KRamp;
  // (t, k(t)) with t increasing in (0, 1]; the final stage must be (1, k_target).
  std::vector<std::pair<double, double>> stages;
  double min_step = 1.0 / 256.0;

  static HomotopySchedule contracting_disk(double t0, double k, int n_stages);
  static HomotopySchedule k_ramp(double k0, double k1, int n_stages);
  static HomotopySchedule equidistant_seed(double k);
};

// Stage failures halve the parameter step and a step doubles after two clean
// stages. When the step underflows the last good stage is returned with
// converged = false. Domination between consecutive stages is checked with
// tolerance 1e-6 and a violation throws for k_ramp schedules.
SolveResult homotopy_solve(const LensProblem& problem, const HomotopySchedule& schedule,
                           const SolverConfig& config = {});

// Outward pushoff seed: lambda = R * taper, with R the smallest distance for
// which pushed-off principal curvatures exceed sqrt(k). The taper is
// smoothstep((1 - |xi|) / 0.25) on the reference disk.
RadialGraph equidistant_seed(const AmbientModel& model, const ImmersedSurface& base, double k);
double equidistant_seed_distance(const AmbientModel& model, double min_principal, double k);

// Inward seed: the cap of the equidistant surface of curvature k through the
// best-fit circle of the boundary loop (exact lens in H3 for round boundaries).
RadialGraph spanning_equidistant_seed(const AmbientModel& model, const ImmersedSurface& base, double k);

}  // namespace ksurf
