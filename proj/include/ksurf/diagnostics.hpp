#pragma once

#include <string>
#include <vector>

#include "ksurf/hyperboloid.hpp"
#include "ksurf/radial_graph.hpp"

namespace ksurf {

enum class DominationKind { Strict, Weak, Violated };
std::string to_string(DominationKind k);

struct DominationResult {
  DominationKind kind = DominationKind::Weak;
  double min_gap = 0.0;  // min over interior vertices of lambda1 - lambda2
  std::vector<int> witnesses;
};

// Does g1 dominate g2 (lambda1 >= lambda2 pointwise)? Strict means
// lambda1 > lambda2 + tol at every interior vertex.
DominationResult domination_check(const RadialGraph& g1, const RadialGraph& g2, double tol = 1e-10);
DominationResult domination_check(const DiskMesh& mesh, const std::vector<double>& lambda1,
                                  const std::vector<double>& lambda2, double tol = 1e-10);

// Comparison families for the geometric maximum principle. Each is the level
// set family of a function phi that grows away from the convex side of the
// surface: distance to `center`, signed distance to `plane`, Busemann
// function of `xi`.
enum class ComparisonKind { Sphere, Equidistant, Horosphere };

struct ComparisonFamily {
  ComparisonKind kind = ComparisonKind::Sphere;
  Vec3 center = Vec3(0, 0, 1);
  HyperbolicPlane plane;
  IdealPoint xi = IdealPoint::infinity();
};

struct Contact {
  int vertex = -1;
  double level = 0.0;
  double comparison_kappa = 0.0;
  double surface_kappa = 0.0;
  double tangency_angle = 0.0;  // between the surface normal and grad phi
  bool interior = false;
  bool inequality_holds = false;
};

struct ContactReport {
  std::vector<Contact> contacts;
  bool all_hold = true;
};

// Contacts are the vertices within level_tol of min phi. Only interior
// contacts are tested: comparison_kappa >= surface_kappa - kappa_tol.
ContactReport maximum_principle_probe(const AmbientModel& model, const ImmersedSurface& surf,
                                      const ComparisonFamily& family, double level_tol = 1e-6,
                                      double kappa_tol = 1e-2);

enum class DegeneracyStatus { Ok, SuspectedTube, SuspectedDegenerate };
std::string to_string(DegeneracyStatus s);

struct DegeneracyThresholds {
  double mean_max = 1e3;
  double anisotropy = 1.5;    // lambda_max / lambda_min
  double kappa_rel = 0.05;    // |kappa - c| <= kappa_rel * c
  double fraction = 0.9;      // share of interior vertices meeting both
};

struct DegeneracyReport {
  DegeneracyStatus status = DegeneracyStatus::Ok;
  double max_mean = 0.0;
  double median_anisotropy = 1.0;
  double tube_fraction = 0.0;
  // Best-fit axis when a tube is suspected.
  IdealPoint axis_a = IdealPoint::infinity();
  IdealPoint axis_b = IdealPoint::infinity();
  double axis_residual = 0.0;  // max distance of the estimated feet to the axis
};

DegeneracyReport degeneracy_diagnostics(const AmbientModel& model, const ImmersedSurface& surf,
                                        const DegeneracyThresholds& th = {});

struct MeshQuality {
  double min_edge = 0.0;
  double max_edge = 0.0;
  double min_angle = 0.0;  // radians
};

MeshQuality mesh_quality(const AmbientModel& model, const ImmersedSurface& surf);

struct EnclosingBall {
  Vec3 center = Vec3(0, 0, 1);
  double radius = 0.0;
};

// Smallest ball containing the points (Badoiu-Clarkson iteration with a
// shrinking step, then the radius is the exact max distance to the center).
EnclosingBall minimal_enclosing_ball(const AmbientModel& model, const std::vector<Vec3>& points);

struct BallInclusion {
  EnclosingBall ball;
  double max_excess = 0.0;  // max over vertices of d(center, x) - radius
  int worst_vertex = -1;
  bool holds = true;
};

BallInclusion boundary_ball_inclusion(const AmbientModel& model, const ImmersedSurface& surf, double slack = 1e-6);

}  // namespace ksurf
