#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksurf/ambient.hpp"
#include "ksurf/report_io.hpp"

namespace ksurf {

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

struct CheckResult {
  std::string module;
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
  Json measured = Json::object();
};

struct ValidationSummary {
  std::vector<CheckResult> checks;
  int count(CheckStatus s) const;
  bool passed() const { return count(CheckStatus::Fail) == 0; }
};

Json to_json(const ValidationSummary& s);

struct ValidationOptions {
  int refinement = 3;
  std::uint64_t seed = 1;
  FaultInjection fault = FaultInjection::None;
  // Randomly perturbed convex surfaces for the sign and comparison checks.
  int sign_samples = 10;
};

// Refinement levels of the convergence-order checks: up to four levels
// ending at `refinement`, never below 1. Fewer than three levels means the
// order checks are skipped with status "insufficient levels".
std::vector<int> refinement_levels(int refinement);

// Least-squares slope of -log2(error) against the level.
double convergence_order(const std::vector<int>& levels, const std::vector<double>& errors);

// Relative kappa error of the closed-form families on planar meshes,
// interior vertices. Families: sphere(1), horosphere, equidistant(artanh 0.5),
// tube(0.7).
struct OracleRow {
  std::string family;
  double exact = 0.0;
  double measured = 0.0;  // at the vertex closest to the patch center
  double max_rel_error = 0.0;
  double max_gauss_defect = 0.0;
};
std::vector<OracleRow> curvature_oracle_table(const AmbientModel& model, int refinement);

// Riccati rate of kappa along the unit normal flow with ambient sectional
// curvatures sec1, sec2 on the principal planes.
double riccati_kappa_rate(double lambda1, double lambda2, double sec1, double sec2);

ValidationSummary run_validation_suite(const ValidationOptions& opts = {});

}  // namespace ksurf
