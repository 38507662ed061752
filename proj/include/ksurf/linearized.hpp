#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "ksurf/surface.hpp"

namespace ksurf {

enum class MaxPrincipleKind {
  MMatrix,          // off-diagonals <= 0 and strict diagonal dominance
  InversePositive,  // verified directly on the factorized interior block
  Violated,
  NotChecked
};

struct MaxPrincipleCertificate {
  MaxPrincipleKind kind = MaxPrincipleKind::NotChecked;
  int positive_offdiagonals = 0;
  double min_inverse_entry = 0.0;      // min of A_II^{-1}, scaled by its max
  double min_boundary_response = 0.0;  // min of -A_II^{-1} A_IB, scaled
  std::vector<int> witnesses;
};

std::string to_string(MaxPrincipleKind k);

enum class HessianStencil {
  Compact,  // one-ring quadratic fit
  Fit,      // the wider stencil of the fundamental-form fit
  Hybrid,   // Fit, except Compact in rows whose fit stencil reaches the boundary
  // Nonnegative weights reproducing the Fit functional on quadratics (one
  // ring first, then the fit neighborhood); M-matrix by construction when
  // J > 0. Rows without a nonnegative solution keep the Fit weights.
  Positive
};

std::string to_string(HessianStencil s);

// Discretization of L(f) = kappa(-tr(Hess f o B^{-1}) + f J) at interior
// vertices, J = tr(W B^{-1}) - tr B.
struct OperatorAssembly {
  std::shared_ptr<const DiskMesh> mesh;
  std::vector<int> interior;  // row -> vertex id
  std::vector<int> row_of;    // vertex id -> row, -1 on the boundary
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;  // rows: interior, cols: all vertices
  std::vector<double> J;      // per vertex, NaN on the boundary
  std::vector<double> kappa;  // per vertex
  std::vector<double> boundary_values;
  HessianStencil stencil = HessianStencil::Fit;
  MaxPrincipleCertificate certificate;

  // Per-vertex result, NaN on boundary vertices.
  std::vector<double> apply(const std::vector<double>& f) const;
};

struct AssembleOptions {
  HessianStencil stencil = HessianStencil::Fit;
  bool certify = true;
  // Largest interior block for which inverse positivity is checked densely.
  int dense_check_limit = 3000;
};

OperatorAssembly assemble_L(const AmbientModel& model, const ImmersedSurface& surf, const AssembleOptions& opts = {});

// Fit stencil first; when its certificate is violated, falls back to Hybrid
// and then Positive. The returned assembly records the stencil used.
OperatorAssembly assemble_certified_L(const AmbientModel& model, const ImmersedSurface& surf,
                                      int dense_check_limit = 3000);

struct ZerothOrderCertificate {
  std::vector<double> J;  // per vertex, NaN on the boundary
  double min_J = 0.0;
  int argmin = -1;
};

// Throws PreconditionError when kappa leaves (0, c) at an interior vertex or
// when min J <= 1e-10.
ZerothOrderCertificate zeroth_order_certificate(const AmbientModel& model, const ImmersedSurface& surf);

struct VariationField {
  std::vector<double> f;
  std::vector<char> prescribed;
};

// Lawson-Hanson nonnegative least squares: argmin |A x - b| subject to x >= 0.
Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

VariationField solve_dirichlet(const OperatorAssembly& a, const std::vector<double>& rhs,
                               const std::vector<double>& boundary);

struct VariationCheck {
  double defect = 0.0;    // sup over interior vertices of |B'_assembled - B'_fd|
  double relative = 0.0;  // defect / sup |B'_fd|
  std::vector<Mat2> assembled;
  std::vector<Mat2> finite_difference;
};

VariationCheck shape_operator_variation_check(const AmbientModel& model, const ImmersedSurface& surf,
                                              const std::vector<double>& f, double step = 1e-4,
                                              HessianStencil stencil = HessianStencil::Fit);

void write_matrix_market(const OperatorAssembly& a, const std::string& path);

}  // namespace ksurf
