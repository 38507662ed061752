#pragma once

#include <vector>

#include "ksurf/ambient.hpp"

namespace ksurf {

// Minkowski coordinates (x1, x2, x3, x0) with <x, y> = x1y1 + x2y2 + x3y3 - x0y0.
// Points of H3 satisfy <x, x> = -1, x0 > 0.
using Vec4 = Eigen::Vector4d;

double minkowski(const Vec4& a, const Vec4& b);

Vec4 to_hyperboloid(const Vec3& p);
Vec3 from_hyperboloid(const Vec4& x);
// Differential of to_hyperboloid at p.
Vec4 push_to_hyperboloid(const Vec3& p, const Vec3& v);
// Null vector representing an ideal point.
Vec4 ideal_null_vector(const IdealPoint& xi);

// Distance from p to the geodesic with ideal endpoints a and b.
double distance_to_geodesic(const Vec3& p, const IdealPoint& a, const IdealPoint& b);
// Ideal point of a nonzero null vector.
IdealPoint ideal_point_of(const Vec4& null_vector);

// Totally geodesic plane {<x, m> = 0}, m spacelike and unit. The signed
// distance is asinh <x, m>; the positive side is the one m points to.
struct HyperbolicPlane {
  Vec4 m = Vec4(0, 0, 1, 0);

  double signed_distance(const Vec3& p) const;
  HyperbolicPlane flipped() const { return {-m}; }
  // Parallel plane along the common perpendicular through `foot` (a point of
  // this plane), displaced by s in the direction of m.
  HyperbolicPlane shifted(const Vec4& foot, double s) const;
  Vec3 project(const Vec3& p) const;
};

// Plane spanned by three distinct ideal points.
HyperbolicPlane plane_through_ideal(const IdealPoint& a, const IdealPoint& b, const IdealPoint& c);
// Plane minimizing the sum of squared Minkowski residuals <x_i, m>^2.
HyperbolicPlane best_fit_plane(const std::vector<Vec3>& points);

// Circle of a totally geodesic plane: center, radius and carrier plane.
struct HyperbolicCircle {
  Vec4 center;
  double radius = 0.0;
  HyperbolicPlane plane;
};

// Best-fit circle through a closed curve (plane fit, projected Lorentz centroid, mean radius).
HyperbolicCircle fit_circle(const std::vector<Vec3>& points);

// Equidistant surface {signed_distance = r} to `plane` containing `circle`,
// whose cap inside the circle lies on the positive side of circle.plane.
// Requires r > 0.
HyperbolicPlane equidistant_carrier(const HyperbolicCircle& circle, double r);

}  // namespace ksurf
