#include "ksurf/radial_graph.hpp"

#include <cmath>

#include "ksurf/errors.hpp"

namespace ksurf {

void RadialGraph::validate() const {
  if (static_cast<int>(lambda.size()) != base.num_vertices())
    throw PreconditionError("graph_size_mismatch", "one height per vertex", "graph heights do not match the base mesh");
  std::vector<int> bad;
  for (int v : base.mesh().boundary_loop())
    if (lambda[v] != 0.0) bad.push_back(v);
  for (int v = 0; v < base.num_vertices(); ++v)
    if (!std::isfinite(lambda[v])) bad.push_back(v);
  if (!bad.empty())
    throw PreconditionError("graph_boundary_nonzero", "lambda = 0 on the boundary",
                            "graph heights must vanish on the boundary and be finite", bad);
}

RadialGraph make_radial_graph(ImmersedSurface base, std::vector<double> lambda, GraphOrientation orientation) {
  RadialGraph g{std::move(base), std::move(lambda), orientation};
  g.validate();
  return g;
}

GeodesicState graph_point(const AmbientModel& model, const RadialGraph& g, int v) {
  const Vec3& p = g.base.positions()[v];
  const Vec3& n = g.base.normals()[v];
  return geodesic_flow(model, p, g.sign() * n, g.lambda[v]);
}

std::vector<Vec3> graph_positions(const AmbientModel& model, const RadialGraph& g) {
  std::vector<Vec3> x(g.base.num_vertices());
  for (int v = 0; v < g.base.num_vertices(); ++v) x[v] = graph_point(model, g, v).position;
  return x;
}

ImmersedSurface graph_embed(const AmbientModel& model, const RadialGraph& g, const FitOptions& opts) {
  const int n = g.base.num_vertices();
  std::vector<Vec3> x(n), nu(n);
  for (int v = 0; v < n; ++v) {
    GeodesicState st = graph_point(model, g, v);
    x[v] = st.position;
    nu[v] = metric_normalize(model, st.position, g.sign() * st.velocity);
  }
  ImmersedSurface s(g.base.mesh_ptr(), std::move(x), std::move(nu));
  return fit_fundamental_forms(model, s, opts);
}

Footprint footprint(const AmbientModel& model, const RadialGraph& g) {
  Footprint f;
  for (int v = 0; v < g.base.num_vertices(); ++v) {
    f.base_vertex.push_back(v);
    f.focal.push_back(graph_point(model, g, v).velocity);
  }
  return f;
}

InverseFunctionReport inverse_function(const AmbientModel& model, const RadialGraph& g, const ImmersedSurface& embedded) {
  InverseFunctionReport r;
  r.mu = g.lambda;
  const auto& X = embedded.positions();
  const auto& edges = embedded.mesh().edges();
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    int a = edges[e][0], b = edges[e][1];
    double d = distance(model, X[a], X[b]);
    if (!(d > 0.0)) continue;
    double ratio = std::abs(r.mu[a] - r.mu[b]) / d;
    if (ratio > r.lipschitz_ratio) {
      r.lipschitz_ratio = ratio;
      r.worst_edge = e;
    }
  }
  return r;
}

}  // namespace ksurf
