#pragma once

#include <array>
#include <vector>

#include "ksurf/ambient.hpp"

namespace ksurf {

enum class DiskMeshKind { GeodesicPolarCap, PlanarDiskSample };

struct TopologyReport {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int euler = 0;
  int boundary_loops = 0;
  bool manifold = true;
  bool oriented = true;
  bool is_disk() const { return manifold && oriented && euler == 1 && boundary_loops == 1; }
};

// Triangle mesh with reference coordinates in the unit disk. Built through
// make_disk_mesh it is always a disk; from_triangles accepts any manifold
// mesh so that closed inputs can be reported instead of crashing.
class DiskMesh {
 public:
  static DiskMesh from_triangles(std::vector<Vec2> reference, std::vector<std::array<int, 3>> triangles);

  int num_vertices() const { return static_cast<int>(reference_.size()); }
  int num_faces() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<Vec2>& reference() const { return reference_; }
  const std::vector<int>& boundary_loop() const { return boundary_loop_; }
  bool is_boundary(int v) const { return boundary_flag_[v] != 0; }
  const std::vector<int>& interior_vertices() const { return interior_; }
  const std::vector<int>& one_ring(int v) const { return ring_[v]; }
  // Vertices within `rings` edge hops, excluding v, ascending ids.
  std::vector<int> neighborhood(int v, int rings) const;
  const TopologyReport& topology() const { return topo_; }

 private:
  std::vector<Vec2> reference_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::vector<int>> ring_;
  std::vector<int> boundary_loop_;
  std::vector<char> boundary_flag_;
  std::vector<int> interior_;
  TopologyReport topo_;
};

// Hexagonal-ring disk with 2^refinement rings. GeodesicPolarCap places ring i
// at radius i/N on the circle of rays (for polar parametrizations);
// PlanarDiskSample keeps the straight hexagonal lattice scaled into the disk.
DiskMesh make_disk_mesh(DiskMeshKind kind, int refinement);

// Icosahedral sphere; closed, used to exercise empty-boundary refusals.
DiskMesh make_closed_sphere_mesh(int refinement);

}  // namespace ksurf
