#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksurf/continuation.hpp"
#include "ksurf/isometry.hpp"
#include "ksurf/parametrized.hpp"

namespace ksurf {

struct FourierTerm {
  int m = 1;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

// Ideal boundary curve given as a radial graph over a round circle. In the
// canonical frame the curve is w(theta) = exp(p(theta)) e^{i theta} and the
// Gauss image is the disk it bounds. `frame()` maps the canonical frame to
// the data: dilation to the circle of angular radius alpha about the
// downward pole seen from (0,0,1), an inversion when the Gauss image is the
// outer disk, then `placement`.
struct IdealDiskData {
  double alpha = M_PI / 2;
  std::vector<FourierTerm> perturbation;
  bool gauss_image_inside = true;
  Isometry placement;

  bool round() const;
  double perturbation_at(double theta) const;
  double perturbation_derivative(double theta) const;
  // Sum of |coefficients|; bounds |p|.
  double amplitude() const;
  // Canonical-frame boundary point.
  Vec2 canonical_point(double theta) const;
  IdealPoint boundary_point(double theta) const;
  Isometry frame() const;
  // Throws PreconditionError: alpha_out_of_range, invalid_perturbation,
  // perturbation_too_large (amplitude above 0.25).
  void validate() const;
};

enum class GlobalDataKind { FullSphere, SphereMinusOne, SphereMinusTwo };
std::string to_string(GlobalDataKind k);
std::optional<GlobalDataKind> parse_global_data_kind(const std::string& s);

struct Refusal {
  GlobalDataKind kind = GlobalDataKind::FullSphere;
  int punctures = 0;
  std::string code;
  std::string citation;
  std::string message;
};

// Complete ideal data (the sphere minus at most two points) admits no
// embedded k-surface; the refusal names the case.
Refusal reject_global_data(GlobalDataKind kind);
[[noreturn]] void throw_refusal(const Refusal& r);

// Supporting half-space of the convex hull of the complement of the Gauss
// image, in the canonical frame: the hemisphere over the round disk
// |w - center| < radius contained in the Gauss image.
struct SupportingDisk {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

struct BarrierOptions {
  int refinement = 3;
  // Exhaustion radius r in (0,1): the subdisk of the barrier whose Gauss
  // image is r times the canonical curve.
  double radius = 0.75;
  double margin = 0.1;       // epsilon0 = artanh(sqrt(k/c)) + margin
  int max_retries = 3;       // margin doubles after a failed certification
  int boundary_disks = 1024;  // maximal disks tangent to the curve
  int curve_samples = 4096;
  FitOptions fit = {FitMethod::ConformalChart, 2, 4, 17};
};

// Barrier as a patch over the reference disk. Reference radius rho maps to
// the Gauss-image scale e(rho): e = rho on the inner half (fixed across
// exhaustion stages), then a monotone cubic reaching `radius` at rho = 1.
class BarrierPatch : public SurfacePatch {
 public:
  BarrierPatch(const IdealDiskData& data, std::vector<SupportingDisk> disks, double epsilon, double radius);
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;
  double radius() const { return radius_; }
  double epsilon() const { return epsilon_; }
  // Canonical-frame Gauss image of reference point xi.
  Vec2 gauss_image(const Vec2& xi) const;
  // Canonical-frame point and metric-unit outward normal.
  GeodesicState canonical(const Vec2& xi) const;

 private:
  IdealDiskData data_;
  Isometry frame_;
  std::vector<SupportingDisk> disks_;
  double epsilon_, radius_;
};

double radial_remap(double rho, double radius);

struct BarrierSurface {
  ImmersedSurface surface;  // fitted forms
  std::shared_ptr<const BarrierPatch> patch;
  double epsilon = 0.0;
  double min_kappa = 0.0;
  int retries = 0;
  int supporting_disks = 0;
};

std::vector<SupportingDisk> supporting_disks(const IdealDiskData& data, const BarrierOptions& opts = {});

// Equidistant pushoff of the hull boundary at epsilon0, certified kappa > k
// at every interior vertex. Round data give the exact equidistant surface. Throws
// SolverError("barrier_certification_failed") when retries run out.
BarrierSurface barrier_surface(const AmbientModel& model, const IdealDiskData& data, double k,
                               const BarrierOptions& opts = {});

struct ExhaustionConfig {
  int refinement = 3;
  double tol = 1e-6;  // stage-to-stage sup change on the probe region
  int first_stage = 2;
  int max_stages = 40;
  double monotonicity_tol = 1e-6;
  double probe_radius = 0.5;  // reference radius of the probe region
  BarrierOptions barrier;
  SolverConfig solver;
};

struct ExhaustionStage {
  int index = 0;
  double radius = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double probe_change = 0.0;  // sup over probes of |f_r - f_r_prev|
  double min_increment = 0.0;  // min over probes of f_r - f_r_prev
  std::string certificate;
};

struct ExhaustionReport {
  bool converged = false;
  std::string failure;
  std::string failure_message;
  double epsilon = 0.0;
  std::vector<ExhaustionStage> stages;
  std::vector<int> probe_vertices;
  std::vector<std::vector<double>> trace;  // trace[stage][probe]
  bool monotone = true;
  double alpha0 = 0.0;
  double delta_bound = 0.0;  // measured delta(alpha0, 0)
  double max_height = 0.0;
  bool bounded = true;
  // Round data only: distance of probe vertices to the closed-form limit.
  std::optional<double> closed_form_error;
  // Round data only: kappa error of the solution (independent geodesic-normal
  // refit) and of the closed-form limit on the same mesh, probe region.
  std::optional<double> solution_kappa_error;
  std::optional<double> oracle_kappa_error;
};

struct ExhaustionResult {
  std::optional<SolveResult> lens;  // final stage
  ExhaustionReport report;
};

// Monotone exhaustion over r_j = 1 - 2^-j, j >= first_stage. Stops with
// failure "monotonicity_violated" when a probe height decreases by more than
// monotonicity_tol, "max_stages" when the probes never settle.
ExhaustionResult exhaustion_solve(const AmbientModel& model, const IdealDiskData& data, double k,
                                  const ExhaustionConfig& config = {});

// Limit surface for round data: equidistant at artanh(sqrt(k/c)) from the
// spanning plane, on the Gauss-image side. Signed distance in the data frame.
double round_limit_distance(const IdealDiskData& data, const Vec3& p);

struct ConeBarrierEstimate {
  double delta = 0.0;
  double spread = 0.0;  // bootstrap (q95 - q05) / delta
  int samples = 0;
};

// Cone of half-angle alpha about a random direction at a random point. The
// asymptotic solution for its ideal circle is intersected with `samples`
// geodesics from the apex at angle <= beta; delta is the largest distance.
// Requires 0 <= beta < alpha <= pi/2.
ConeBarrierEstimate cone_barrier_delta(const AmbientModel& model, double alpha, double beta, double k, int samples,
                                       std::uint64_t seed = 1);

struct Alpha0Measurement {
  double alpha0 = 0.0;
  double step = 0.0;
  std::vector<double> tested;
  std::vector<bool> passed;
};

// Largest alpha on a grid of step pi/(2 * resolution) up to pi such that for
// every smaller grid angle the apex lies in the hull of the complementary
// ideal disk and the asymptotic solution stays inside the cone.
Alpha0Measurement measure_alpha0(const AmbientModel& model, double k, int resolution = 90);

}  // namespace ksurf
