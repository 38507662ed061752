#include "ksurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ksurf/errors.hpp"

namespace ksurf {

DiskMesh DiskMesh::from_triangles(std::vector<Vec2> reference, std::vector<std::array<int, 3>> triangles) {
  DiskMesh m;
  m.reference_ = std::move(reference);
  m.triangles_ = std::move(triangles);
  const int n = m.num_vertices();
  std::map<std::array<int, 2>, int> undirected;
  std::map<std::array<int, 2>, int> directed;
  for (const auto& t : m.triangles_) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a < 0 || a >= n || b < 0 || b >= n || a == b)
        throw PreconditionError("invalid_mesh", "valid triangles", "triangle references an invalid vertex");
      undirected[{std::min(a, b), std::max(a, b)}]++;
      directed[{a, b}]++;
    }
  }
  TopologyReport& tr = m.topo_;
  m.ring_.assign(n, {});
  std::map<int, int> next_on_boundary;
  for (const auto& [e, cnt] : undirected) {
    m.edges_.push_back(e);
    m.ring_[e[0]].push_back(e[1]);
    m.ring_[e[1]].push_back(e[0]);
    if (cnt > 2) tr.manifold = false;
  }
  for (const auto& [e, cnt] : directed) {
    if (cnt > 1) tr.oriented = false;
    if (undirected[{std::min(e[0], e[1]), std::max(e[0], e[1])}] == 1) {
      if (next_on_boundary.count(e[0])) tr.manifold = false;
      next_on_boundary[e[0]] = e[1];
    }
  }
  for (auto& r : m.ring_) std::sort(r.begin(), r.end());
  m.boundary_flag_.assign(n, 0);
  std::vector<char> seen(n, 0);
  for (const auto& [start, nxt] : next_on_boundary) {
    if (seen[start]) continue;
    tr.boundary_loops++;
    std::vector<int> loop;
    int v = start;
    while (!seen[v]) {
      seen[v] = 1;
      m.boundary_flag_[v] = 1;
      loop.push_back(v);
      auto it = next_on_boundary.find(v);
      if (it == next_on_boundary.end()) {
        tr.manifold = false;
        break;
      }
      v = it->second;
    }
    if (m.boundary_loop_.empty()) m.boundary_loop_ = loop;
  }
  for (int v = 0; v < n; ++v)
    if (!m.boundary_flag_[v]) m.interior_.push_back(v);
  tr.vertices = n;
  tr.edges = m.num_edges();
  tr.faces = m.num_faces();
  tr.euler = tr.vertices - tr.edges + tr.faces;
  return m;
}

std::vector<int> DiskMesh::neighborhood(int v, int rings) const {
  std::vector<int> level{v};
  std::vector<int> out;
  std::vector<char> mark(reference_.size(), 0);
  mark[v] = 1;
  for (int r = 0; r < rings; ++r) {
    std::vector<int> next;
    for (int a : level)
      for (int b : ring_[a])
        if (!mark[b]) {
          mark[b] = 1;
          next.push_back(b);
          out.push_back(b);
        }
    level = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DiskMesh make_disk_mesh(DiskMeshKind kind, int refinement) {
  if (refinement < 0 || refinement > 10)
    throw PreconditionError("invalid_refinement", "0 <= refinement", "refinement out of range");
  const int N = 1 << refinement;
  auto start = [](int i) { return i == 0 ? 0 : 1 + 3 * i * (i - 1); };
  auto vid = [&](int i, int m) { return i == 0 ? 0 : start(i) + ((m % (6 * i)) + 6 * i) % (6 * i); };
  std::vector<Vec2> ref(1 + 3 * N * (N + 1), Vec2::Zero());
  for (int i = 1; i <= N; ++i) {
    double r = double(i) / N;
    for (int m = 0; m < 6 * i; ++m) {
      Vec2 p;
      if (kind == DiskMeshKind::GeodesicPolarCap) {
        double th = 2.0 * M_PI * m / (6.0 * i);
        p = r * Vec2(std::cos(th), std::sin(th));
      } else {
        int s = m / i, j = m % i;
        Vec2 c0(std::cos(M_PI * s / 3.0), std::sin(M_PI * s / 3.0));
        Vec2 c1(std::cos(M_PI * (s + 1) / 3.0), std::sin(M_PI * (s + 1) / 3.0));
        p = r * (c0 + (double(j) / i) * (c1 - c0));
      }
      ref[vid(i, m)] = p;
    }
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(6 * N * N);
  for (int i = 0; i < N; ++i)
    for (int s = 0; s < 6; ++s) {
      auto in = [&](int j) { return vid(i, s * i + j); };
      auto out = [&](int j) { return vid(i + 1, s * (i + 1) + j); };
      for (int j = 0; j <= i; ++j) tris.push_back({in(j), out(j), out(j + 1)});
      for (int j = 0; j < i; ++j) tris.push_back({in(j), out(j + 1), in(j + 1)});
    }
  DiskMesh mesh = DiskMesh::from_triangles(std::move(ref), std::move(tris));
  if (!mesh.topology().is_disk()) throw SolverError("mesh_topology", "generated mesh is not a disk");
  return mesh;
}

DiskMesh make_closed_sphere_mesh(int refinement) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : v) p.normalize();
  for (int r = 0; r < refinement; ++r) {
    std::map<std::array<int, 2>, int> mid;
    auto midpoint = [&](int a, int b) {
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      mid[key] = static_cast<int>(v.size()) - 1;
      return mid[key];
    };
    std::vector<std::array<int, 3>> nf;
    for (const auto& tri : f) {
      int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      nf.push_back({tri[0], a, c});
      nf.push_back({tri[1], b, a});
      nf.push_back({tri[2], c, b});
      nf.push_back({a, b, c});
    }
    f = std::move(nf);
  }
  std::vector<Vec2> ref;
  for (const auto& p : v) ref.emplace_back(p.x(), p.y());
  return DiskMesh::from_triangles(std::move(ref), std::move(f));
}

}  // namespace ksurf
