#include "handrec/mesh/trimesh.hpp"

#include <algorithm>
#include <map>

#include "handrec/common/error.hpp"

namespace handrec::mesh {

void validate(const TriMesh& mesh) {
  const Eigen::Index nv = mesh.n_vertices();
  // Directed edge -> count. An undirected edge with consistent winding
  // contributes (i,j) from one face and (j,i) from the other; a duplicated
  // directed edge means either >2 incident faces or flipped winding.
  std::map<std::pair<int, int>, int> directed;
  for (Eigen::Index f = 0; f < mesh.n_faces(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    require(a >= 0 && b >= 0 && c >= 0 && a < nv && b < nv && c < nv,
            "face ", f, " references a vertex outside [0, ", nv, ")");
    require(a != b && b != c && a != c, "face ", f, " is degenerate");
    for (auto [i, j] : {std::pair{a, b}, {b, c}, {c, a}}) {
      if (++directed[{i, j}] > 1)
        fail("edge (", i, ",", j, ") is non-manifold or inconsistently wound");
    }
  }
}

TriMesh make_trimesh(Vertices vertices, Faces faces) {
  TriMesh mesh{std::move(vertices), std::move(faces)};
  validate(mesh);
  return mesh;
}

VertexAdjacency build_adjacency(const TriMesh& mesh) {
  validate(mesh);
  const Eigen::Index nv = mesh.n_vertices();

  // Around vertex v, face (v, x, y) contributes the directed ring step x->y.
  std::vector<std::vector<std::pair<int, int>>> steps(nv);
  for (Eigen::Index f = 0; f < mesh.n_faces(); ++f) {
    const int v[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    for (int k = 0; k < 3; ++k)
      steps[v[k]].emplace_back(v[(k + 1) % 3], v[(k + 2) % 3]);
  }

  VertexAdjacency adj;
  adj.rings.resize(nv);
  adj.boundary.assign(nv, false);

  std::vector<std::pair<int, int>> local;
  for (Eigen::Index v = 0; v < nv; ++v) {
    local = steps[v];
    if (local.empty()) continue;  // isolated vertex: empty ring
    std::sort(local.begin(), local.end());

    // Chain the directed steps. A neighbor with no incoming step starts an
    // open chain (boundary); if none exists the ring is a closed cycle.
    std::map<int, int> next;
    std::map<int, int> indegree;
    for (auto [from, to] : local) {
      require(!next.count(from), "vertex ", v, " is non-manifold");
      next[from] = to;
      indegree[from];  // ensure key
      indegree[to]++;
    }
    std::vector<int> starts;
    for (auto& [node, deg] : indegree)
      if (deg == 0) starts.push_back(node);
    require(starts.size() <= 1, "vertex ", v, " is non-manifold");

    int start;
    bool open = !starts.empty();
    if (open) {
      start = starts.front();
    } else {
      start = indegree.begin()->first;  // smallest index: canonical rotation
    }

    std::vector<int>& ring = adj.rings[v];
    int cur = start;
    while (true) {
      ring.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) break;  // end of open chain
      cur = it->second;
      if (cur == start) break;  // cycle closed
    }
    require(ring.size() == indegree.size(), "vertex ", v, " is non-manifold");
    adj.boundary[v] = open;
  }
  return adj;
}

std::vector<std::pair<int, int>> edge_set(const TriMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mesh.n_faces() * 3);
  for (Eigen::Index f = 0; f < mesh.n_faces(); ++f) {
    const int v[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    for (int k = 0; k < 3; ++k) {
      int i = v[k], j = v[(k + 1) % 3];
      edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> edge_matrix(
    const TriMesh& mesh) {
  const auto edges = edge_set(mesh);
  Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> out(edges.size(), 2);
  for (size_t e = 0; e < edges.size(); ++e) {
    out(static_cast<Eigen::Index>(e), 0) = edges[e].first;
    out(static_cast<Eigen::Index>(e), 1) = edges[e].second;
  }
  return out;
}

}  // namespace handrec::mesh
