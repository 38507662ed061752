#include "ksurf/linearized.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "ksurf/errors.hpp"

namespace ksurf {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

void require_elliptic(const AmbientModel& model, const ImmersedSurface& surf) {
  const auto& forms = surf.forms();
  const double c = model.curvature_upper_bound();
  std::vector<int> outside, singular;
  for (int v : surf.mesh().interior_vertices()) {
    const auto& f = forms[v];
    if (!(f.kappa > 0.0 && f.kappa < c)) outside.push_back(v);
    if (!(f.principal[0] > 1e-8)) singular.push_back(v);
  }
  if (!outside.empty())
    throw PreconditionError("kappa_outside_interval", "0 < kappa < c",
                            std::to_string(outside.size()) + " interior vertices have kappa outside (0, c)", outside);
  if (!singular.empty())
    throw PreconditionError("shape_operator_singular", "B positive definite",
                            std::to_string(singular.size()) + " interior vertices have a non-positive principal curvature",
                            singular);
}

double vertex_J(const AmbientModel& model, const ImmersedSurface& surf, int v) {
  const auto& f = surf.forms()[v];
  Mat2 W = curvature_in_frame(model, surf.positions()[v], surf.normals()[v], f.e1, f.e2);
  return (W * f.shape.inverse()).trace() - f.shape.trace();
}

const LocalStencil& pick(const VertexForms& f, HessianStencil which, const DiskMesh& mesh) {
  if (f.compact.neighbors.empty() || which == HessianStencil::Fit) return f.stencil;
  if (which == HessianStencil::Compact) return f.compact;
  for (int w : f.stencil.neighbors)
    if (mesh.is_boundary(w)) return f.compact;
  return f.stencil;
}

Mat2 stencil_hessian(const LocalStencil& st, const std::vector<double>& field, int v) {
  const auto& nb = st.neighbors;
  double h11 = 0, h12 = 0, h22 = 0;
  for (int j = 0; j < static_cast<int>(nb.size()); ++j) {
    double d = field[nb[j]] - field[v];
    h11 += st.rows(2, j) * d;
    h12 += st.rows(3, j) * d;
    h22 += st.rows(4, j) * d;
  }
  Mat2 H;
  H << h11, h12, h12, h22;
  return H;
}

Eigen::Matrix<double, 5, 1> quad_monomials(const Vec2& x) {
  Eigen::Matrix<double, 5, 1> m;
  m << x[0], x[1], x[0] * x[0], x[0] * x[1], x[1] * x[1];
  return m;
}

// Target functional f -> tr(Hess f o Bi) of the fit stencil, reproduced with
// nonnegative weights. Returns false when no nonnegative solution exists.
bool positive_row(const VertexForms& f, const Mat2& Bi, std::vector<int>& nb, std::vector<double>& w) {
  const auto& st = f.stencil;
  const int n = static_cast<int>(st.neighbors.size());
  Eigen::Matrix<double, 5, 1> target = Eigen::Matrix<double, 5, 1>::Zero();
  for (int j = 0; j < n; ++j) {
    double sj = st.rows(2, j) * Bi(0, 0) + 2.0 * st.rows(3, j) * Bi(0, 1) + st.rows(4, j) * Bi(1, 1);
    target += sj * quad_monomials(st.coords.col(j));
  }
  std::vector<std::vector<int>> candidates;
  if (!f.compact.neighbors.empty()) {
    std::vector<int> idx;
    for (int w2 : f.compact.neighbors)
      idx.push_back(static_cast<int>(std::lower_bound(st.neighbors.begin(), st.neighbors.end(), w2) - st.neighbors.begin()));
    candidates.push_back(idx);
  }
  std::vector<int> all(n);
  for (int j = 0; j < n; ++j) all[j] = j;
  candidates.push_back(all);
  for (const auto& idx : candidates) {
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd M(5, m);
    for (int k = 0; k < m; ++k) M.col(k) = quad_monomials(st.coords.col(idx[k]));
    Eigen::VectorXd t = target;
    for (int r = 0; r < 5; ++r) {
      double s = M.row(r).norm();
      if (s > 0.0) {
        M.row(r) /= s;
        t[r] /= s;
      }
    }
    Eigen::VectorXd x = nonnegative_least_squares(M, t);
    if ((M * x - t).norm() <= 1e-9 * std::max(t.norm(), 1e-300)) {
      nb.clear();
      w.clear();
      for (int k = 0; k < m; ++k)
        if (x[k] > 0.0) {
          nb.push_back(st.neighbors[idx[k]]);
          w.push_back(x[k]);
        }
      return true;
    }
  }
  return false;
}

void split_blocks(const OperatorAssembly& a, SpMat& AII, SpMat& AIB, std::vector<int>& bcols) {
  const int n = a.mesh->num_vertices();
  std::vector<int> bindex(n, -1);
  bcols.clear();
  for (int v = 0; v < n; ++v)
    if (a.row_of[v] < 0) {
      bindex[v] = static_cast<int>(bcols.size());
      bcols.push_back(v);
    }
  std::vector<Eigen::Triplet<double>> ti, tb;
  for (int r = 0; r < a.matrix.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.matrix, r); it; ++it) {
      int col = static_cast<int>(it.col());
      if (a.row_of[col] >= 0)
        ti.emplace_back(r, a.row_of[col], it.value());
      else
        tb.emplace_back(r, bindex[col], it.value());
    }
  const int ni = static_cast<int>(a.interior.size());
  AII.resize(ni, ni);
  AII.setFromTriplets(ti.begin(), ti.end());
  AIB.resize(ni, static_cast<int>(bcols.size()));
  AIB.setFromTriplets(tb.begin(), tb.end());
}

MaxPrincipleCertificate certify(const OperatorAssembly& a, int dense_limit) {
  MaxPrincipleCertificate c;
  bool dominant = true;
  for (int r = 0; r < a.matrix.outerSize(); ++r) {
    int v = a.interior[r];
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.matrix, r); it; ++it)
      if (it.col() == v)
        diag = it.value();
      else
        off += std::abs(it.value());
    if (!(diag > off)) dominant = false;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.matrix, r); it; ++it)
      if (it.col() != v && it.value() > 1e-14 * std::abs(diag)) {
        c.positive_offdiagonals++;
        if (c.witnesses.empty() || c.witnesses.back() != v) c.witnesses.push_back(v);
      }
  }
  if (c.positive_offdiagonals == 0 && dominant) {
    c.witnesses.clear();
    c.kind = MaxPrincipleKind::MMatrix;
    return c;
  }
  const int ni = static_cast<int>(a.interior.size());
  if (ni > dense_limit) {
    c.kind = MaxPrincipleKind::NotChecked;
    return c;
  }
  SpMat AII, AIB;
  std::vector<int> bcols;
  split_blocks(a, AII, AIB, bcols);
  Eigen::MatrixXd inv = Eigen::MatrixXd(AII).partialPivLu().inverse();
  Eigen::MatrixXd resp = -inv * Eigen::MatrixXd(AIB);
  double imax = inv.cwiseAbs().maxCoeff();
  double rmax = resp.size() ? resp.cwiseAbs().maxCoeff() : 1.0;
  c.min_inverse_entry = inv.minCoeff() / imax;
  c.min_boundary_response = resp.size() ? resp.minCoeff() / std::max(rmax, 1e-300) : 0.0;
  c.witnesses.clear();
  const double tol = -1e-10;
  for (int r = 0; r < ni; ++r) {
    bool bad = inv.row(r).minCoeff() / imax < tol;
    if (resp.cols() > 0 && resp.row(r).minCoeff() / std::max(rmax, 1e-300) < tol) bad = true;
    if (bad) c.witnesses.push_back(a.interior[r]);
  }
  c.kind = c.witnesses.empty() ? MaxPrincipleKind::InversePositive : MaxPrincipleKind::Violated;
  return c;
}

}  // namespace

std::string to_string(MaxPrincipleKind k) {
  switch (k) {
    case MaxPrincipleKind::MMatrix:
      return "m_matrix";
    case MaxPrincipleKind::InversePositive:
      return "inverse_positive";
    case MaxPrincipleKind::Violated:
      return "violated";
    case MaxPrincipleKind::NotChecked:
      return "not_checked";
  }
  return "unknown";
}

std::string to_string(HessianStencil s) {
  switch (s) {
    case HessianStencil::Compact:
      return "compact";
    case HessianStencil::Fit:
      return "fit";
    case HessianStencil::Hybrid:
      return "hybrid";
    case HessianStencil::Positive:
      return "positive";
  }
  return "unknown";
}

std::vector<double> OperatorAssembly::apply(const std::vector<double>& f) const {
  const int n = mesh->num_vertices();
  if (static_cast<int>(f.size()) != n)
    throw PreconditionError("field_size_mismatch", "one value per vertex", "field does not match the mesh");
  Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
  Eigen::VectorXd r = matrix * fv;
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < static_cast<int>(interior.size()); ++i) out[interior[i]] = r[i];
  return out;
}

OperatorAssembly assemble_L(const AmbientModel& model, const ImmersedSurface& surf, const AssembleOptions& opts) {
  require_elliptic(model, surf);
  const auto& forms = surf.forms();
  const DiskMesh& mesh = surf.mesh();
  const int n = mesh.num_vertices();
  OperatorAssembly a;
  a.mesh = surf.mesh_ptr();
  a.stencil = opts.stencil;
  a.interior = mesh.interior_vertices();
  a.row_of.assign(n, -1);
  for (int i = 0; i < static_cast<int>(a.interior.size()); ++i) a.row_of[a.interior[i]] = i;
  a.J.assign(n, std::numeric_limits<double>::quiet_NaN());
  a.kappa.resize(n);
  a.boundary_values.assign(n, 0.0);
  for (int v = 0; v < n; ++v) a.kappa[v] = forms[v].kappa;
  std::vector<Eigen::Triplet<double>> trip;
  for (int r = 0; r < static_cast<int>(a.interior.size()); ++r) {
    int v = a.interior[r];
    const auto& f = forms[v];
    Mat2 Bi = f.shape.inverse();
    double J = vertex_J(model, surf, v);
    a.J[v] = J;
    double k = f.kappa;
    double diag = k * J;
    std::vector<int> pnb;
    std::vector<double> pw;
    if (opts.stencil == HessianStencil::Positive && positive_row(f, Bi, pnb, pw)) {
      for (size_t j = 0; j < pnb.size(); ++j) {
        trip.emplace_back(r, pnb[j], -k * pw[j]);
        diag += k * pw[j];
      }
    } else {
      const LocalStencil& st = pick(f, opts.stencil, mesh);
      const auto& nb = st.neighbors;
      for (int j = 0; j < static_cast<int>(nb.size()); ++j) {
        double cj = st.rows(2, j) * Bi(0, 0) + 2.0 * st.rows(3, j) * Bi(0, 1) + st.rows(4, j) * Bi(1, 1);
        trip.emplace_back(r, nb[j], -k * cj);
        diag += k * cj;
      }
    }
    trip.emplace_back(r, v, diag);
  }
  a.matrix.resize(static_cast<int>(a.interior.size()), n);
  a.matrix.setFromTriplets(trip.begin(), trip.end());
  if (opts.certify) a.certificate = certify(a, opts.dense_check_limit);
  return a;
}

OperatorAssembly assemble_certified_L(const AmbientModel& model, const ImmersedSurface& surf, int dense_check_limit) {
  AssembleOptions o;
  o.dense_check_limit = dense_check_limit;
  OperatorAssembly a;
  for (HessianStencil s : {HessianStencil::Fit, HessianStencil::Hybrid, HessianStencil::Positive}) {
    o.stencil = s;
    a = assemble_L(model, surf, o);
    if (a.certificate.kind != MaxPrincipleKind::Violated) break;
  }
  return a;
}

ZerothOrderCertificate zeroth_order_certificate(const AmbientModel& model, const ImmersedSurface& surf) {
  require_elliptic(model, surf);
  ZerothOrderCertificate z;
  z.J.assign(surf.num_vertices(), std::numeric_limits<double>::quiet_NaN());
  z.min_J = std::numeric_limits<double>::infinity();
  for (int v : surf.mesh().interior_vertices()) {
    z.J[v] = vertex_J(model, surf, v);
    if (z.J[v] < z.min_J) {
      z.min_J = z.J[v];
      z.argmin = v;
    }
  }
  if (!(z.min_J > 1e-10))
    throw PreconditionError("zeroth_order_sign", "J > 0 when 0 < kappa < c",
                            "zeroth-order coefficient J is not positive", {z.argmin});
  return z;
}

Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(n, 0);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max<double>(A.rows(), n) *
                     std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  auto solve_passive = [&]() {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), static_cast<int>(idx.size()));
    for (int k = 0; k < static_cast<int>(idx.size()); ++k) Ap.col(k) = A.col(idx[k]);
    Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < static_cast<int>(idx.size()); ++k) s[idx[k]] = sp[k];
    return s;
  };
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int t = -1;
    double best = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    if (t < 0) break;
    passive[t] = 1;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      Eigen::VectorXd s = solve_passive();
      bool positive = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && s[j] <= 0.0) positive = false;
      if (positive) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (int j = 0; j < n; ++j)
        if (passive[j] && s[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - s[j]));
      x += alpha * (s - x);
      for (int j = 0; j < n; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = 0;
          x[j] = 0.0;
        }
    }
  }
  return x;
}

VariationField solve_dirichlet(const OperatorAssembly& a, const std::vector<double>& rhs,
                               const std::vector<double>& boundary) {
  const int n = a.mesh->num_vertices();
  if (static_cast<int>(rhs.size()) != n || static_cast<int>(boundary.size()) != n)
    throw PreconditionError("field_size_mismatch", "one value per vertex", "rhs/boundary do not match the mesh");
  if (a.certificate.kind == MaxPrincipleKind::Violated)
    throw SolverError("discrete_maximum_principle_violated",
                      "assembled stencil violates the discrete maximum principle at " +
                          std::to_string(a.certificate.witnesses.size()) + " vertices");
  SpMat AII, AIB;
  std::vector<int> bcols;
  split_blocks(a, AII, AIB, bcols);
  const int ni = static_cast<int>(a.interior.size());
  Eigen::VectorXd fb(static_cast<int>(bcols.size()));
  for (int i = 0; i < fb.size(); ++i) fb[i] = boundary[bcols[i]];
  Eigen::VectorXd b(ni);
  for (int r = 0; r < ni; ++r) b[r] = rhs[a.interior[r]];
  b -= AIB * fb;
  AII.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(AII);
  if (lu.info() != Eigen::Success) throw SolverError("linear_solver_breakdown", "sparse LU factorization failed");
  Eigen::VectorXd x = lu.solve(b);
  double res = (AII * x - b).norm();
  if (!(res <= 1e-10 * std::max(1.0, b.norm())))
    throw SolverError("linear_solver_breakdown", "linear residual above tolerance");
  VariationField out;
  out.f.assign(n, 0.0);
  out.prescribed.assign(n, 0);
  for (int i = 0; i < fb.size(); ++i) {
    out.f[bcols[i]] = boundary[bcols[i]];
    out.prescribed[bcols[i]] = 1;
  }
  for (int r = 0; r < ni; ++r) out.f[a.interior[r]] = x[r];
  return out;
}

VariationCheck shape_operator_variation_check(const AmbientModel& model, const ImmersedSurface& surf,
                                              const std::vector<double>& f, double step, HessianStencil stencil) {
  const auto& forms = surf.forms();
  const int n = surf.num_vertices();
  VertexFitter fitter(model, surf.mesh_ptr(), surf.fit_options());
  VariationCheck out;
  out.assembled.assign(n, Mat2::Zero());
  out.finite_difference.assign(n, Mat2::Zero());
  std::array<std::vector<Vec3>, 2> moved;
  for (int s = 0; s < 2; ++s) {
    double t = s == 0 ? step : -step;
    moved[s].resize(n);
    for (int v = 0; v < n; ++v)
      moved[s][v] = geodesic_flow(model, surf.positions()[v], surf.normals()[v], t * f[v]).position;
  }
  double fd_max = 0.0;
  for (int v : surf.mesh().interior_vertices()) {
    const auto& fv = forms[v];
    Mat2 W = curvature_in_frame(model, surf.positions()[v], surf.normals()[v], fv.e1, fv.e2);
    Mat2 H = stencil_hessian(pick(fv, stencil, surf.mesh()), f, v);
    out.assembled[v] = f[v] * W - H - f[v] * fv.shape * fv.shape;

    Vec3 nu0 = surf.normals()[v];
    Eigen::Matrix2Xd c0;
    fitter.fit(v, surf.positions(), nu0, &c0);
    const int m = static_cast<int>(c0.cols());
    double sc = std::sqrt(c0.squaredNorm() / m);
    Eigen::MatrixXd D(m, 9);
    for (int j = 0; j < m; ++j) {
      double x = c0(0, j) / sc, y = c0(1, j) / sc;
      D.row(j) << x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    std::array<Mat2, 2> pulled;
    for (int s = 0; s < 2; ++s) {
      Vec3 nu = nu0;
      Eigen::Matrix2Xd ct;
      VertexForms ft = fitter.fit(v, moved[s], nu, &ct);
      Mat2 Phi;
      for (int r = 0; r < 2; ++r) {
        Eigen::VectorXd coef = qr.solve(Eigen::VectorXd(ct.row(r).transpose()));
        Phi(r, 0) = coef[0] / sc;
        Phi(r, 1) = coef[1] / sc;
      }
      pulled[s] = Phi.inverse() * ft.shape * Phi;
    }
    out.finite_difference[v] = (pulled[0] - pulled[1]) / (2.0 * step);
    out.defect = std::max(out.defect, (out.assembled[v] - out.finite_difference[v]).norm());
    fd_max = std::max(fd_max, out.finite_difference[v].norm());
  }
  out.relative = fd_max > 0.0 ? out.defect / fd_max : out.defect;
  return out;
}

void write_matrix_market(const OperatorAssembly& a, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("io_open_failed", "cannot open " + path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << "% rows: interior vertices in ascending id; columns: all vertex ids (1-based)\n";
  os << a.matrix.rows() << " " << a.matrix.cols() << " " << a.matrix.nonZeros() << "\n";
  os << std::setprecision(17);
  for (int r = 0; r < a.matrix.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.matrix, r); it; ++it)
      os << r + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
  if (!os) throw IoError("io_write_failed", "failed writing " + path);
}

}  // namespace ksurf
