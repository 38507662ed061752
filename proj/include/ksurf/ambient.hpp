#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

namespace ksurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Point of the upper half-space chart, z > 0.
class ChartPoint {
 public:
  ChartPoint() = default;
  ChartPoint(double x, double y, double z);
  explicit ChartPoint(const Vec3& c);

  const Vec3& coords() const { return c_; }
  double x() const { return c_.x(); }
  double y() const { return c_.y(); }
  double z() const { return c_.z(); }

 private:
  Vec3 c_{0.0, 0.0, 1.0};
};

// Chart components of a tangent vector; norms always use the metric at `base`.
struct TangentVector {
  ChartPoint base;
  Vec3 components = Vec3::Zero();
};

class IdealPoint {
 public:
  static IdealPoint infinity();
  static IdealPoint on_plane(double x, double y);

  bool is_infinity() const { return infinite_; }
  const Vec2& plane_point() const { return xy_; }

 private:
  bool infinite_ = true;
  Vec2 xy_ = Vec2::Zero();
};

// Gaussian bump of the log conformal factor: sigma += log(1 + a exp(-|p-c|^2 / 2w^2)).
struct WarpBump {
  Vec3 center = Vec3(0, 0, 1);
  double amplitude = 0.0;
  double width = 1.0;
};

// Box of the chart swept when certifying the curvature bound of a warped model.
struct CertificationRegion {
  Vec3 lo = Vec3(-3.0, -3.0, 0.2);
  Vec3 hi = Vec3(3.0, 3.0, 5.0);
  int samples_per_axis = 13;
};

enum class ModelKind { HyperbolicHalfSpace, WarpedMetric };

// Deliberate faults for mutation testing of the validation suite.
enum class FaultInjection { None, FlipCurvatureSign };

// u with g = exp(2u) * delta, plus flat derivatives.
struct ConformalJet {
  double u = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

class AmbientModel {
 public:
  static AmbientModel hyperbolic();
  // Throws PreconditionError when the certification sweep finds a sectional
  // curvature above -c + 1e-6.
  static AmbientModel warped(std::vector<WarpBump> bumps, double c,
                             const CertificationRegion& region = {});

  ModelKind kind() const { return kind_; }
  bool closed_form() const { return kind_ == ModelKind::HyperbolicHalfSpace; }
  double curvature_upper_bound() const { return c_; }
  const std::vector<WarpBump>& bumps() const { return bumps_; }
  // Largest sectional curvature seen by the certification sweep (-1 for H3).
  double certified_max_sectional() const { return certified_max_; }

  FaultInjection fault() const { return fault_; }
  AmbientModel with_fault(FaultInjection f) const;

  ConformalJet jet(const Vec3& p) const;
  double log_factor(const Vec3& p) const;
  Vec3 log_factor_gradient(const Vec3& p) const;

 private:
  ModelKind kind_ = ModelKind::HyperbolicHalfSpace;
  double c_ = 1.0;
  double certified_max_ = -1.0;
  std::vector<WarpBump> bumps_;
  FaultInjection fault_ = FaultInjection::None;
};

void require_chart_point(const Vec3& p);

double metric_inner(const AmbientModel& m, const Vec3& p, const Vec3& a, const Vec3& b);
double metric_norm(const AmbientModel& m, const Vec3& p, const Vec3& a);
Vec3 metric_normalize(const AmbientModel& m, const Vec3& p, const Vec3& a);

struct MetricAndConnection {
  Mat3 metric;
  // christoffel[k](i, j) = Gamma^k_ij
  std::array<Mat3, 3> christoffel;
};

MetricAndConnection metric_and_connection(const AmbientModel& m, const ChartPoint& p);

// W(u) = R(n,u)n restricted to n-perp, written in the metric-orthonormal
// frame (e1, e2). Eigenvalue on direction e is -sec(n, e).
struct CurvatureEndomorphism {
  Vec3 e1;
  Vec3 e2;
  Mat2 w;
};

CurvatureEndomorphism curvature_endomorphism(const AmbientModel& m, const TangentVector& n);
// Same map in a caller-supplied orthonormal frame (n, e1, e2) at p.
Mat2 curvature_in_frame(const AmbientModel& m, const Vec3& p, const Vec3& n, const Vec3& e1,
                        const Vec3& e2);

double sectional_curvature(const AmbientModel& m, const ChartPoint& p, const Vec3& a,
                           const Vec3& b);
// Maximum over all 2-planes at p.
double max_sectional_curvature(const AmbientModel& m, const Vec3& p);

struct GeodesicState {
  Vec3 position;
  Vec3 velocity;
};

// Position and velocity at parameter t of the geodesic with initial velocity v.
GeodesicState geodesic_flow(const AmbientModel& m, const Vec3& p, const Vec3& v, double t);
ChartPoint exp_map(const AmbientModel& m, const TangentVector& v, double t = 1.0);
TangentVector log_map(const AmbientModel& m, const ChartPoint& p, const ChartPoint& q);
Vec3 log_vector(const AmbientModel& m, const Vec3& p, const Vec3& q);
double distance(const AmbientModel& m, const ChartPoint& p, const ChartPoint& q);
double distance(const AmbientModel& m, const Vec3& p, const Vec3& q);

// Truncation parameter actually used by the last warped evaluation is reported
// through `ray_length` when non-null.
double busemann(const AmbientModel& m, const ChartPoint& p, const IdealPoint& xi,
                const ChartPoint& basepoint, double* ray_length = nullptr);

enum class ModelFamilyKind { Sphere, Horosphere, EquidistantToPlane, TubeAroundGeodesic };

struct ModelFamily {
  ModelFamilyKind kind = ModelFamilyKind::Sphere;
  double r = 1.0;
};

struct ModelSurfaceCurvatures {
  double lambda1 = 0.0;  // smaller principal curvature
  double lambda2 = 0.0;
  double kappa = 0.0;
};

ModelSurfaceCurvatures model_surface_curvatures(const AmbientModel& m, const ModelFamily& f);

}  // namespace ksurf
