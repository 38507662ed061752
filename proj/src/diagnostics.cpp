#include "ksurf/diagnostics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ksurf/errors.hpp"

namespace ksurf {

std::string to_string(DominationKind k) {
  switch (k) {
    case DominationKind::Strict:
      return "strict";
    case DominationKind::Weak:
      return "weak";
    case DominationKind::Violated:
      return "violated";
  }
  return "unknown";
}

std::string to_string(DegeneracyStatus s) {
  switch (s) {
    case DegeneracyStatus::Ok:
      return "ok";
    case DegeneracyStatus::SuspectedTube:
      return "suspected_tube";
    case DegeneracyStatus::SuspectedDegenerate:
      return "suspected_degenerate";
  }
  return "unknown";
}

DominationResult domination_check(const DiskMesh& mesh, const std::vector<double>& l1, const std::vector<double>& l2,
                                  double tol) {
  const int n = mesh.num_vertices();
  if (static_cast<int>(l1.size()) != n || static_cast<int>(l2.size()) != n)
    throw PreconditionError("mesh_mismatch", "graphs over the same base mesh", "graph sizes differ from the mesh");
  DominationResult r;
  r.min_gap = std::numeric_limits<double>::infinity();
  bool strict = true;
  for (int v = 0; v < n; ++v) {
    double gap = l1[v] - l2[v];
    if (gap < -tol) r.witnesses.push_back(v);
    if (!mesh.is_boundary(v)) {
      r.min_gap = std::min(r.min_gap, gap);
      if (!(gap > tol)) strict = false;
    }
  }
  if (!std::isfinite(r.min_gap)) r.min_gap = 0.0;
  if (!r.witnesses.empty())
    r.kind = DominationKind::Violated;
  else
    r.kind = strict && !mesh.interior_vertices().empty() ? DominationKind::Strict : DominationKind::Weak;
  return r;
}

DominationResult domination_check(const RadialGraph& g1, const RadialGraph& g2, double tol) {
  const DiskMesh& a = g1.base.mesh();
  const DiskMesh& b = g2.base.mesh();
  if (&a != &b && (a.num_vertices() != b.num_vertices() || a.triangles() != b.triangles()))
    throw PreconditionError("mesh_mismatch", "graphs over the same base mesh", "domination needs a common base mesh");
  return domination_check(a, g1.lambda, g2.lambda, tol);
}

namespace {

double level_value(const AmbientModel& model, const ComparisonFamily& f, const Vec3& x) {
  switch (f.kind) {
    case ComparisonKind::Sphere:
      return distance(model, f.center, x);
    case ComparisonKind::Equidistant:
      return f.plane.signed_distance(x);
    case ComparisonKind::Horosphere:
      return busemann(model, ChartPoint(x), f.xi, ChartPoint(0, 0, 1));
  }
  return 0.0;
}

double level_kappa(const ComparisonFamily& f, double level) {
  switch (f.kind) {
    case ComparisonKind::Sphere: {
      double t = 1.0 / std::tanh(level);
      return t * t;
    }
    case ComparisonKind::Equidistant: {
      double t = std::tanh(level);
      return level > 0.0 ? t * t : 0.0;
    }
    case ComparisonKind::Horosphere:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

ContactReport maximum_principle_probe(const AmbientModel& model, const ImmersedSurface& surf,
                                      const ComparisonFamily& family, double level_tol, double kappa_tol) {
  if (!model.closed_form())
    throw PreconditionError("model_not_hyperbolic", "constant curvature -1",
                            "comparison curvatures are closed forms of the hyperbolic model");
  const auto& forms = surf.forms();
  const auto& X = surf.positions();
  const int n = surf.num_vertices();
  std::vector<double> phi(n);
  double lo = std::numeric_limits<double>::infinity();
  for (int v = 0; v < n; ++v) {
    phi[v] = level_value(model, family, X[v]);
    lo = std::min(lo, phi[v]);
  }
  ContactReport rep;
  for (int v = 0; v < n; ++v) {
    if (phi[v] > lo + level_tol) continue;
    Contact c;
    c.vertex = v;
    c.level = phi[v];
    c.comparison_kappa = level_kappa(family, phi[v]);
    c.surface_kappa = forms[v].kappa;
    c.interior = !surf.mesh().is_boundary(v);
    const Vec3& p = X[v];
    const double h = 1e-6 * p.z();
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = h;
      g[i] = (level_value(model, family, p + e) - level_value(model, family, p - e)) / (2.0 * h);
    }
    double e2u = std::exp(2.0 * model.log_factor(p));
    Vec3 grad = metric_normalize(model, p, g / e2u);
    double cosang = std::clamp(metric_inner(model, p, grad, surf.normals()[v]), -1.0, 1.0);
    c.tangency_angle = std::acos(cosang);
    c.inequality_holds = !c.interior || c.comparison_kappa >= c.surface_kappa - kappa_tol;
    if (!c.inequality_holds) rep.all_hold = false;
    rep.contacts.push_back(c);
  }
  return rep;
}

DegeneracyReport degeneracy_diagnostics(const AmbientModel& model, const ImmersedSurface& surf,
                                        const DegeneracyThresholds& th) {
  const auto& forms = surf.forms();
  const double c = model.curvature_upper_bound();
  const double sc = std::sqrt(c);
  DegeneracyReport r;
  std::vector<double> aniso;
  std::vector<Vec4> feet;
  int tube_like = 0, count = 0;
  for (int v : surf.mesh().interior_vertices()) {
    const auto& f = forms[v];
    r.max_mean = std::max(r.max_mean, std::abs(f.mean));
    double l1 = f.principal[0], l2 = f.principal[1];
    double a = l1 > 0.0 ? l2 / l1 : std::numeric_limits<double>::infinity();
    aniso.push_back(a);
    ++count;
    if (a > th.anisotropy && std::abs(f.kappa - c) <= th.kappa_rel * c) {
      ++tube_like;
      if (l1 > 0.0 && l1 < sc) {
        double rv = std::atanh(l1 / sc) / sc;
        Vec3 foot = geodesic_flow(model, surf.positions()[v], -surf.normals()[v], rv).position;
        feet.push_back(to_hyperboloid(foot));
      }
    }
  }
  if (!aniso.empty()) {
    std::nth_element(aniso.begin(), aniso.begin() + aniso.size() / 2, aniso.end());
    r.median_anisotropy = aniso[aniso.size() / 2];
  }
  r.tube_fraction = count ? static_cast<double>(tube_like) / count : 0.0;
  if (!(r.max_mean <= th.mean_max)) {
    r.status = DegeneracyStatus::SuspectedDegenerate;
    return r;
  }
  if (r.tube_fraction < th.fraction || feet.size() < 2) return r;
  r.status = DegeneracyStatus::SuspectedTube;
  Eigen::MatrixXd F(4, static_cast<int>(feet.size()));
  for (int i = 0; i < F.cols(); ++i) F.col(i) = feet[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU);
  Vec4 a = svd.matrixU().col(0), b = svd.matrixU().col(1);
  Mat2 Q;
  Q << minkowski(a, a), minkowski(a, b), minkowski(a, b), minkowski(b, b);
  Eigen::SelfAdjointEigenSolver<Mat2> es(Q);
  double lneg = es.eigenvalues()[0], lpos = es.eigenvalues()[1];
  if (!(lneg < 0.0 && lpos > 0.0)) return r;
  Vec2 e1 = es.eigenvectors().col(1) / std::sqrt(lpos), e2 = es.eigenvectors().col(0) / std::sqrt(-lneg);
  Vec2 w1 = e1 + e2, w2 = e1 - e2;
  r.axis_a = ideal_point_of(w1[0] * a + w1[1] * b);
  r.axis_b = ideal_point_of(w2[0] * a + w2[1] * b);
  for (const auto& x : feet) r.axis_residual = std::max(r.axis_residual, distance_to_geodesic(from_hyperboloid(x), r.axis_a, r.axis_b));
  return r;
}

MeshQuality mesh_quality(const AmbientModel& model, const ImmersedSurface& surf) {
  MeshQuality q;
  q.min_edge = std::numeric_limits<double>::infinity();
  q.min_angle = M_PI;
  const auto& X = surf.positions();
  for (const auto& e : surf.mesh().edges()) {
    double d = distance(model, X[e[0]], X[e[1]]);
    q.min_edge = std::min(q.min_edge, d);
    q.max_edge = std::max(q.max_edge, d);
  }
  for (const auto& t : surf.mesh().triangles()) {
    double l[3];
    for (int k = 0; k < 3; ++k) l[k] = distance(model, X[t[(k + 1) % 3]], X[t[(k + 2) % 3]]);
    for (int k = 0; k < 3; ++k) {
      double a = l[k], b = l[(k + 1) % 3], c = l[(k + 2) % 3];
      double cosA = (std::cosh(b) * std::cosh(c) - std::cosh(a)) / (std::sinh(b) * std::sinh(c));
      q.min_angle = std::min(q.min_angle, std::acos(std::clamp(cosA, -1.0, 1.0)));
    }
  }
  return q;
}

EnclosingBall minimal_enclosing_ball(const AmbientModel& model, const std::vector<Vec3>& pts) {
  if (pts.empty()) throw PreconditionError("empty_point_set", "at least one point", "no points to enclose");
  Vec4 sum = Vec4::Zero();
  for (const auto& p : pts) sum += to_hyperboloid(p);
  Vec3 c = from_hyperboloid(sum / std::sqrt(-minkowski(sum, sum)));
  auto farthest = [&](const Vec3& x, double& dmax) {
    int arg = 0;
    dmax = -1.0;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      double d = distance(model, x, pts[i]);
      if (d > dmax) {
        dmax = d;
        arg = i;
      }
    }
    return arg;
  };
  double best;
  farthest(c, best);
  Vec3 best_c = c;
  for (int it = 1; it <= 4000; ++it) {
    double d;
    int f = farthest(c, d);
    if (d < best) {
      best = d;
      best_c = c;
    }
    Vec3 v = log_vector(model, c, pts[f]);
    c = geodesic_flow(model, c, v, 1.0 / (it + 1.0)).position;
  }
  EnclosingBall b;
  b.center = best_c;
  farthest(best_c, b.radius);
  return b;
}

BallInclusion boundary_ball_inclusion(const AmbientModel& model, const ImmersedSurface& surf, double slack) {
  std::vector<Vec3> bpts;
  for (int v : surf.mesh().boundary_loop()) bpts.push_back(surf.positions()[v]);
  BallInclusion r;
  r.ball = minimal_enclosing_ball(model, bpts);
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < surf.num_vertices(); ++v) {
    double e = distance(model, r.ball.center, surf.positions()[v]) - r.ball.radius;
    if (e > r.max_excess) {
      r.max_excess = e;
      r.worst_vertex = v;
    }
  }
  r.holds = r.max_excess <= slack;
  return r;
}

}  // namespace ksurf
