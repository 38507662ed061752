#include "ksurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

void tangent_frame(const Vec3& nu, Vec3& a, Vec3& b) {
  Vec3 seed = std::abs(nu.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  a = (seed - seed.dot(nu) * nu).normalized();
  b = nu.cross(a);
}

int n_terms(int degree) { return degree == 2 ? 5 : degree == 3 ? 9 : 14; }

Eigen::MatrixXd design(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int degree) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd X(n, n_terms(degree));
  for (int k = 0; k < n; ++k) {
    double x = a[k], y = b[k];
    X(k, 0) = x;
    X(k, 1) = y;
    X(k, 2) = 0.5 * x * x;
    X(k, 3) = x * y;
    X(k, 4) = 0.5 * y * y;
    int c = 5;
    for (int d = 3; d <= degree; ++d)
      for (int i = 0; i <= d; ++i) X(k, c++) = std::pow(x, d - i) * std::pow(y, i);
  }
  return X;
}

// Angle opposite side c of a triangle of constant curvature -1.
double hyperbolic_angle(double a, double b, double c) {
  double s = 0.5 * (a + b + c);
  double num = std::sinh(s - a) * std::sinh(s - b);
  double den = std::sinh(s) * std::sinh(s - c);
  if (!(num > 0.0) || !(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * std::atan(std::sqrt(num / den));
}

}  // namespace

ImmersedSurface::ImmersedSurface(std::shared_ptr<const DiskMesh> mesh, std::vector<Vec3> positions,
                                 std::vector<Vec3> normals)
    : mesh_(std::move(mesh)), positions_(std::move(positions)), normals_(std::move(normals)) {
  if (!mesh_ || static_cast<int>(positions_.size()) != mesh_->num_vertices() ||
      normals_.size() != positions_.size())
    throw PreconditionError("surface_size_mismatch", "one position and normal per vertex",
                            "surface arrays do not match the mesh");
}

const std::vector<VertexForms>& ImmersedSurface::forms() const {
  if (forms_.empty()) throw PreconditionError("forms_missing", "fitted forms", "fundamental forms have not been fitted");
  return forms_;
}

void ImmersedSurface::set_forms(std::vector<VertexForms> forms, std::vector<Vec3> normals, const FitOptions& opts) {
  forms_ = std::move(forms);
  normals_ = std::move(normals);
  fit_opts_ = opts;
}

Vec2 principal_curvatures(const Mat2& b, bool* umbilic) {
  double m = 0.5 * (b(0, 0) + b(1, 1));
  double h = 0.5 * (b(0, 0) - b(1, 1));
  double d = std::hypot(h, b(0, 1));
  if (umbilic) *umbilic = false;
  if (2.0 * d < 1e-10) {
    double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    if (umbilic) *umbilic = true;
    if (det > 0.0) {
      double r = std::copysign(std::sqrt(det), m);
      return Vec2(r, r);
    }
    return Vec2(m, m);
  }
  return Vec2(m - d, m + d);
}

VertexFitter::VertexFitter(const AmbientModel& model, std::shared_ptr<const DiskMesh> mesh, FitOptions opts)
    : model_(model), mesh_(std::move(mesh)), opts_(opts) {
  const int n = mesh_->num_vertices();
  nbrs_.resize(n);
  reverse_.assign(n, {});
  for (int v = 0; v < n; ++v) {
    std::vector<int> nb = mesh_->neighborhood(v, opts_.rings);
    if (static_cast<int>(nb.size()) < opts_.min_neighbors) nb = mesh_->neighborhood(v, opts_.rings + 1);
    nbrs_[v] = nb;
  }
  for (int v = 0; v < n; ++v) {
    reverse_[v].push_back(v);
    for (int j : nbrs_[v]) reverse_[j].push_back(v);
  }
  for (auto& r : reverse_) std::sort(r.begin(), r.end());
}

VertexForms VertexFitter::fit(int v, const std::vector<Vec3>& X, Vec3& normal, Eigen::Matrix2Xd* coords) const {
  const auto& nb = nbrs_[v];
  const int n = static_cast<int>(nb.size());
  if (n < 5)
    throw PreconditionError("underdetermined_fit", ">= 5 neighbors within two rings",
                            "vertex " + std::to_string(v) + " has too few neighbors for a quadratic fit", {v});
  int degree = opts_.degree;
  while (degree > 2 && n < n_terms(degree) + 3) --degree;
  const bool cubic = degree >= 3;
  const bool geo = opts_.method == FitMethod::GeodesicNormal;
  const Vec3& p = X[v];
  ConformalJet jet = model_.jet(p);
  const double eu = std::exp(jet.u);
  Eigen::Matrix3Xd W(3, n);
  for (int k = 0; k < n; ++k) W.col(k) = geo ? Vec3(eu * log_vector(model_, p, X[nb[k]])) : Vec3(X[nb[k]] - p);

  Vec3 nu = normal.normalized();
  Vec3 e1, e2;
  Eigen::VectorXd a(n), b(n), h(n), coef;
  Eigen::MatrixXd D;
  double scale = 0.0, tilt = 0.0;
  for (int it = 0; it < 30; ++it) {
    tangent_frame(nu, e1, e2);
    a = W.transpose() * e1;
    b = W.transpose() * e2;
    h = W.transpose() * nu;
    scale = std::sqrt((a.squaredNorm() + b.squaredNorm()) / n);
    if (!(scale > 0.0)) throw SolverError("degenerate_tangent_fit", "neighbors collapse onto the vertex");
    D = design(a / scale, b / scale, degree);
    coef = D.colPivHouseholderQr().solve(h);
    double gx = coef[0] / scale, gy = coef[1] / scale;
    tilt = std::hypot(gx, gy);
    if (!std::isfinite(tilt)) throw SolverError("degenerate_tangent_fit", "tangent-plane fit produced non-finite values");
    if (tilt < 1e-13) break;
    nu = (nu - gx * e1 - gy * e2).normalized();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < D.cols())
    throw SolverError("degenerate_tangent_fit", "rank-deficient fit at vertex " + std::to_string(v));
  Eigen::MatrixXd P = qr.solve(Eigen::MatrixXd::Identity(n, n));
  coef = P * h;

  VertexForms f;
  f.cubic = cubic;
  f.tangent_tilt = tilt;
  f.fit_residual = std::sqrt((D * coef - h).squaredNorm() / n);
  Vec2 grad(coef[0] / scale, coef[1] / scale);
  Mat2 H;
  H << coef[2], coef[3], coef[3], coef[4];
  H /= scale * scale;
  Mat2 G = Mat2::Identity() + grad * grad.transpose();
  Mat2 II = -H / std::sqrt(1.0 + grad.squaredNorm());
  Mat2 Bop = G.inverse() * II;
  double bn = Bop.norm();
  f.symmetry_defect = bn > 0.0 ? std::abs(Bop(0, 1) - Bop(1, 0)) / bn : 0.0;
  Mat2 B = 0.5 * (Bop + Bop.transpose());
  f.first_form = G;

  auto to_rows = [&](const Eigen::MatrixXd& Pm) {
    Eigen::Matrix<double, 5, Eigen::Dynamic> rows(5, Pm.cols());
    rows.row(0) = Pm.row(0) / scale;
    rows.row(1) = Pm.row(1) / scale;
    for (int r = 2; r < 5; ++r) rows.row(r) = Pm.row(r) / (scale * scale);
    if (geo) return rows;
    double u1 = jet.grad.dot(e1), u2 = jet.grad.dot(e2);
    Eigen::RowVectorXd G1 = rows.row(0), G2 = rows.row(1);
    Eigen::RowVectorXd h11 = rows.row(2) - u1 * G1 + u2 * G2;
    Eigen::RowVectorXd h12 = rows.row(3) - (u1 * G2 + u2 * G1);
    Eigen::RowVectorXd h22 = rows.row(4) + u1 * G1 - u2 * G2;
    double s2 = 1.0 / (eu * eu);
    rows.row(0) = G1 / eu;
    rows.row(1) = G2 / eu;
    rows.row(2) = s2 * h11;
    rows.row(3) = s2 * h12;
    rows.row(4) = s2 * h22;
    return rows;
  };
  if (!geo) B = (B + jet.grad.dot(nu) * Mat2::Identity()) / eu;
  f.stencil.neighbors = nb;
  f.stencil.rows = to_rows(P);
  f.stencil.coords.resize(2, n);
  f.stencil.coords.row(0) = a.transpose();
  f.stencil.coords.row(1) = b.transpose();

  // Quadratic fit through the one-ring only, in the same frame.
  const auto& ring = mesh_->one_ring(v);
  if (static_cast<int>(ring.size()) >= 5) {
    std::vector<int> idx;
    for (int w : ring) idx.push_back(static_cast<int>(std::lower_bound(nb.begin(), nb.end(), w) - nb.begin()));
    const int m = static_cast<int>(idx.size());
    Eigen::VectorXd ra(m), rb(m);
    for (int k = 0; k < m; ++k) {
      ra[k] = a[idx[k]] / scale;
      rb[k] = b[idx[k]] / scale;
    }
    Eigen::MatrixXd Dc = design(ra, rb, 2);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qc(Dc);
    if (qc.rank() == Dc.cols()) {
      f.compact.neighbors.resize(m);
      for (int k = 0; k < m; ++k) f.compact.neighbors[k] = nb[idx[k]];
      f.compact.rows = to_rows(qc.solve(Eigen::MatrixXd::Identity(m, m)));
      f.compact.coords.resize(2, m);
      for (int k = 0; k < m; ++k) f.compact.coords.col(k) = f.stencil.coords.col(idx[k]);
    }
  }
  f.shape = B;
  bool umb = false;
  f.principal = principal_curvatures(B, &umb);
  f.umbilic_fallback = umb;
  f.kappa = f.principal[0] * f.principal[1];
  f.mean = f.principal[0] + f.principal[1];
  f.e1 = e1 / eu;
  f.e2 = e2 / eu;
  if (coords) {
    coords->resize(2, n);
    double cs = geo ? 1.0 : eu;
    coords->row(0) = cs * a.transpose();
    coords->row(1) = cs * b.transpose();
  }
  normal = nu / eu;
  return f;
}

ImmersedSurface fit_fundamental_forms(const AmbientModel& model, const ImmersedSurface& surf, const FitOptions& opts) {
  VertexFitter fitter(model, surf.mesh_ptr(), opts);
  const int n = surf.num_vertices();
  std::vector<VertexForms> forms(n);
  std::vector<Vec3> normals = surf.normals();
  for (int v = 0; v < n; ++v) {
    if (!(metric_norm(model, surf.positions()[v], normals[v]) > 0.0))
      throw PreconditionError("normals_missing", "normals present", "surface normal missing at a vertex", {v});
    forms[v] = fitter.fit(v, surf.positions(), normals[v]);
  }
  ImmersedSurface out = surf;
  out.set_forms(std::move(forms), std::move(normals), opts);
  return out;
}

std::vector<double> extrinsic_curvature(const ImmersedSurface& surf) {
  std::vector<double> k;
  for (const auto& f : surf.forms()) k.push_back(f.kappa);
  return k;
}

std::vector<double> mean_curvature(const ImmersedSurface& surf) {
  std::vector<double> k;
  for (const auto& f : surf.forms()) k.push_back(f.mean);
  return k;
}

std::vector<double> intrinsic_curvature(const AmbientModel& model, const ImmersedSurface& surf) {
  const DiskMesh& mesh = surf.mesh();
  const auto& X = surf.positions();
  const int n = surf.num_vertices();
  std::vector<double> angle(n, 0.0), area(n, 0.0);
  for (const auto& t : mesh.triangles()) {
    double la = distance(model, X[t[1]], X[t[2]]);
    double lb = distance(model, X[t[2]], X[t[0]]);
    double lc = distance(model, X[t[0]], X[t[1]]);
    double A0 = hyperbolic_angle(lb, lc, la);
    double A1 = hyperbolic_angle(lc, la, lb);
    double A2 = hyperbolic_angle(la, lb, lc);
    double ar = M_PI - (A0 + A1 + A2);
    angle[t[0]] += A0;
    angle[t[1]] += A1;
    angle[t[2]] += A2;
    for (int k = 0; k < 3; ++k) area[t[k]] += ar / 3.0;
  }
  std::vector<double> K(n, std::numeric_limits<double>::quiet_NaN());
  for (int v : mesh.interior_vertices()) K[v] = -1.0 + (2.0 * M_PI - angle[v]) / area[v];
  return K;
}

std::vector<double> gauss_equation_defect(const AmbientModel& model, const ImmersedSurface& surf) {
  const auto& forms = surf.forms();
  std::vector<double> K = intrinsic_curvature(model, surf);
  std::vector<double> out(K.size(), std::numeric_limits<double>::quiet_NaN());
  for (int v : surf.mesh().interior_vertices()) {
    double sec = sectional_curvature(model, ChartPoint(surf.positions()[v]), forms[v].e1, forms[v].e2);
    out[v] = K[v] - (sec + forms[v].kappa);
  }
  return out;
}

}  // namespace ksurf
