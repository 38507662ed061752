#pragma once

#include <memory>
#include <vector>

#include "ksurf/ambient.hpp"
#include "ksurf/mesh.hpp"

namespace ksurf {

enum class FitMethod {
  // Height fit in geodesic normal coordinates at each vertex (log map).
  GeodesicNormal,
  // Height fit in the Euclidean chart, converted by the conformal
  // transformation law. Stays accurate close to the ideal boundary.
  ConformalChart
};

struct FitOptions {
  FitMethod method = FitMethod::GeodesicNormal;
  int rings = 2;
  // Polynomial degree of the height fit (2, 3 or 4); falls back to lower
  // degrees when the neighborhood is too small.
  int degree = 4;
  // Neighborhoods smaller than this grow by one ring.
  int min_neighbors = 17;
};

// Linear functionals on (f_j - f_v) over the neighbors of v giving the
// surface gradient (rows 0,1) and Hessian (rows 2,3,4 = f_11, f_12, f_22)
// in the vertex frame. `coords` holds the neighbors' tangent coordinates in
// which the fit was made.
struct LocalStencil {
  std::vector<int> neighbors;
  Eigen::Matrix<double, 5, Eigen::Dynamic> rows;
  Eigen::Matrix2Xd coords;
};

struct VertexForms {
  Vec3 e1 = Vec3::Zero();  // metric-orthonormal tangent frame (chart components)
  Vec3 e2 = Vec3::Zero();
  Mat2 first_form = Mat2::Identity();
  Mat2 shape = Mat2::Zero();  // symmetrized B in (e1, e2)
  double symmetry_defect = 0.0;
  Vec2 principal = Vec2::Zero();  // ascending
  double kappa = 0.0;             // principal(0) * principal(1)
  double mean = 0.0;              // principal(0) + principal(1)
  double fit_residual = 0.0;
  double tangent_tilt = 0.0;
  bool umbilic_fallback = false;
  bool cubic = true;
  LocalStencil stencil;
  // One-ring quadratic stencil in the same frame; empty when the ring has
  // fewer than 5 vertices.
  LocalStencil compact;
};

class ImmersedSurface {
 public:
  ImmersedSurface(std::shared_ptr<const DiskMesh> mesh, std::vector<Vec3> positions, std::vector<Vec3> normals);

  const DiskMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const DiskMesh>& mesh_ptr() const { return mesh_; }
  int num_vertices() const { return static_cast<int>(positions_.size()); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  bool has_forms() const { return !forms_.empty(); }
  // Throws PreconditionError("forms_missing") when not fitted.
  const std::vector<VertexForms>& forms() const;
  const FitOptions& fit_options() const { return fit_opts_; }

  void set_forms(std::vector<VertexForms> forms, std::vector<Vec3> normals, const FitOptions& opts);

 private:
  std::shared_ptr<const DiskMesh> mesh_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> normals_;
  std::vector<VertexForms> forms_;
  FitOptions fit_opts_;
};

// Per-vertex fitting engine. Neighborhoods are precomputed once per mesh so
// that solvers can refit single vertices after local position changes.
class VertexFitter {
 public:
  VertexFitter(const AmbientModel& model, std::shared_ptr<const DiskMesh> mesh, FitOptions opts = {});

  const FitOptions& options() const { return opts_; }
  const std::vector<int>& neighbors(int v) const { return nbrs_[v]; }
  // Vertices whose fit reads vertex v.
  const std::vector<int>& dependents(int v) const { return reverse_[v]; }

  // `normal` holds the orientation guess on input and the fitted metric-unit
  // normal on output. `coords`, when given, receives the orthonormal tangent
  // coordinates of the neighbors in the returned frame.
  VertexForms fit(int v, const std::vector<Vec3>& positions, Vec3& normal, Eigen::Matrix2Xd* coords = nullptr) const;

 private:
  AmbientModel model_;
  std::shared_ptr<const DiskMesh> mesh_;
  FitOptions opts_;
  std::vector<std::vector<int>> nbrs_;
  std::vector<std::vector<int>> reverse_;
};

ImmersedSurface fit_fundamental_forms(const AmbientModel& model, const ImmersedSurface& surf, const FitOptions& opts = {});

std::vector<double> extrinsic_curvature(const ImmersedSurface& surf);
std::vector<double> mean_curvature(const ImmersedSurface& surf);

// Interior vertices only; NaN on the boundary.
std::vector<double> intrinsic_curvature(const AmbientModel& model, const ImmersedSurface& surf);
std::vector<double> gauss_equation_defect(const AmbientModel& model, const ImmersedSurface& surf);

// Symmetric 2x2 eigenvalues, ascending, with the umbilic fallback.
Vec2 principal_curvatures(const Mat2& b, bool* umbilic = nullptr);

}  // namespace ksurf
