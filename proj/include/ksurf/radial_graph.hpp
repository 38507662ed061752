#pragma once

#include <vector>

#include "ksurf/surface.hpp"

namespace ksurf {

// Inward graphs sit inside the convex base (lens problems); outward graphs
// are parallel pushoffs.
enum class GraphOrientation { Outward, Inward };

struct RadialGraph {
  ImmersedSurface base;
  std::vector<double> lambda;
  GraphOrientation orientation = GraphOrientation::Inward;

  double sign() const { return orientation == GraphOrientation::Outward ? 1.0 : -1.0; }
  // Throws PreconditionError unless sizes match and boundary heights are zero.
  void validate() const;
};

RadialGraph make_radial_graph(ImmersedSurface base, std::vector<double> lambda,
                              GraphOrientation orientation = GraphOrientation::Inward);

// Position and focal velocity d/dt exp(t s n) at t = lambda.
GeodesicState graph_point(const AmbientModel& model, const RadialGraph& g, int v);
std::vector<Vec3> graph_positions(const AmbientModel& model, const RadialGraph& g);

// Embedded surface with normals fitted (initial guess from the focal field).
ImmersedSurface graph_embed(const AmbientModel& model, const RadialGraph& g, const FitOptions& opts = {});

struct Footprint {
  std::vector<int> base_vertex;
  std::vector<Vec3> focal;
};

Footprint footprint(const AmbientModel& model, const RadialGraph& g);

struct InverseFunctionReport {
  std::vector<double> mu;
  double lipschitz_ratio = 0.0;
  int worst_edge = -1;
};

InverseFunctionReport inverse_function(const AmbientModel& model, const RadialGraph& g, const ImmersedSurface& embedded);

}  // namespace ksurf
