#include "handrec/sampling/qem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "handrec/common/error.hpp"

namespace handrec::sampling {

namespace {

constexpr double kBoundaryPenalty = 1000.0;

using Vec3 = Eigen::RowVector3d;

struct Candidate {
  double cost;
  int u, v;      // u < v
  int target;    // collapse into this endpoint
  int stamp_u, stamp_v;

  bool operator>(const Candidate& other) const {
    if (cost != other.cost) return cost > other.cost;
    if (u != other.u) return u > other.u;
    return v > other.v;
  }
};

struct Decimator {
  const mesh::TriMesh& in;
  Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> faces;
  std::vector<bool> face_alive;
  std::vector<bool> vertex_alive;
  std::vector<int> stamp;
  std::vector<std::vector<int>> vfaces;  // incident alive faces
  std::vector<Eigen::Matrix4d> quadric;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
  int n_alive;

  explicit Decimator(const mesh::TriMesh& mesh)
      : in(mesh),
        faces(mesh.faces),
        face_alive(static_cast<size_t>(mesh.n_faces()), true),
        vertex_alive(static_cast<size_t>(mesh.n_vertices()), true),
        stamp(static_cast<size_t>(mesh.n_vertices()), 0),
        vfaces(static_cast<size_t>(mesh.n_vertices())),
        quadric(static_cast<size_t>(mesh.n_vertices()),
                Eigen::Matrix4d::Zero()),
        n_alive(static_cast<int>(mesh.n_vertices())) {
    for (Eigen::Index f = 0; f < faces.rows(); ++f)
      for (int k = 0; k < 3; ++k)
        vfaces[static_cast<size_t>(faces(f, k))].push_back(
            static_cast<int>(f));
    accumulate_quadrics();
    for (const auto& e : mesh::edge_set(mesh)) push_candidate(e.first, e.second);
  }

  Vec3 pos(int v) const { return in.vertices.row(v); }

  static Eigen::Matrix4d plane_quadric(const Vec3& n, double d, double w) {
    Eigen::Vector4d p(n[0], n[1], n[2], d);
    return w * (p * p.transpose());
  }

  void accumulate_quadrics() {
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
      const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
      const Vec3 e1 = pos(b) - pos(a), e2 = pos(c) - pos(a);
      Vec3 n = e1.cross(e2);
      const double area2 = n.norm();
      if (area2 > 1e-14) {
        n /= area2;
        const double area = 0.5 * area2;
        const Eigen::Matrix4d q = plane_quadric(n, -n.dot(pos(a)), area);
        quadric[static_cast<size_t>(a)] += q;
        quadric[static_cast<size_t>(b)] += q;
        quadric[static_cast<size_t>(c)] += q;
      }
      for (int k = 0; k < 3; ++k) {
        const int i = faces(f, k), j = faces(f, (k + 1) % 3);
        edge_faces[std::minmax(i, j)].push_back(static_cast<int>(f));
      }
    }
    // Constraint planes pin the boundary: perpendicular to the single
    // incident face, weighted by penalty * edge length^2.
    for (const auto& [edge, incident] : edge_faces) {
      if (incident.size() != 1) continue;
      const auto [i, j] = edge;
      const int f = incident.front();
      const Vec3 e1 = pos(faces(f, 1)) - pos(faces(f, 0));
      const Vec3 e2 = pos(faces(f, 2)) - pos(faces(f, 0));
      const Vec3 fn = e1.cross(e2);
      const Vec3 edge_dir = pos(j) - pos(i);
      Vec3 m = fn.cross(edge_dir);
      const double len = m.norm();
      if (len < 1e-14) continue;
      m /= len;
      const Eigen::Matrix4d q = plane_quadric(
          m, -m.dot(pos(i)), kBoundaryPenalty * edge_dir.squaredNorm());
      quadric[static_cast<size_t>(i)] += q;
      quadric[static_cast<size_t>(j)] += q;
    }
  }

  double cost_at(const Eigen::Matrix4d& q, const Vec3& p) const {
    Eigen::Vector4d h(p[0], p[1], p[2], 1.0);
    return h.dot(q * h);
  }

  void push_candidate(int u, int v) {
    if (u > v) std::swap(u, v);
    const Eigen::Matrix4d q =
        quadric[static_cast<size_t>(u)] + quadric[static_cast<size_t>(v)];
    const double cu = cost_at(q, pos(u));
    const double cv = cost_at(q, pos(v));
    Candidate c;
    c.u = u;
    c.v = v;
    c.target = cu <= cv ? u : v;
    c.cost = std::min(cu, cv);
    c.stamp_u = stamp[static_cast<size_t>(u)];
    c.stamp_v = stamp[static_cast<size_t>(v)];
    heap.push(c);
  }

  std::set<int> neighbors(int v) const {
    std::set<int> out;
    for (int f : vfaces[static_cast<size_t>(v)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      for (int k = 0; k < 3; ++k)
        if (faces(f, k) != v) out.insert(faces(f, k));
    }
    return out;
  }

  std::vector<int> faces_with_edge(int u, int v) const {
    std::vector<int> out;
    for (int f : vfaces[static_cast<size_t>(u)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      for (int k = 0; k < 3; ++k)
        if (faces(f, k) == v) {
          out.push_back(f);
          break;
        }
    }
    return out;
  }

  bool vertex_on_boundary(int v) const {
    std::map<int, int> edge_count;
    for (int f : vfaces[static_cast<size_t>(v)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      for (int k = 0; k < 3; ++k)
        if (faces(f, k) != v) edge_count[faces(f, k)]++;
    }
    for (const auto& [n, c] : edge_count)
      if (c == 1) return true;
    return false;
  }

  bool collapse_ok(int target, int gone, const std::vector<int>& shared) {
    // Link condition: the common neighborhood must be exactly the opposite
    // vertices of the faces on the collapsing edge.
    std::set<int> common;
    const auto nt = neighbors(target);
    for (int n : neighbors(gone))
      if (nt.count(n)) common.insert(n);
    if (common.size() != shared.size()) return false;

    const bool edge_boundary = shared.size() == 1;
    if (!edge_boundary && vertex_on_boundary(gone))
      return false;  // boundary vertices may only slide along the boundary

    // Reject duplicate faces and normal flips among the retargeted faces.
    std::set<std::array<int, 3>> target_tris;
    for (int f : vfaces[static_cast<size_t>(target)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      std::array<int, 3> tri{faces(f, 0), faces(f, 1), faces(f, 2)};
      std::sort(tri.begin(), tri.end());
      target_tris.insert(tri);
    }
    for (int f : vfaces[static_cast<size_t>(gone)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
      bool removed = false;
      for (int k = 0; k < 3; ++k)
        if (faces(f, k) == target) removed = true;
      if (removed) continue;  // face on the collapsing edge disappears
      const Vec3 before =
          (pos(b) - pos(a)).cross(pos(c) - pos(a));
      const int na = a == gone ? target : a;
      const int nb = b == gone ? target : b;
      const int nc = c == gone ? target : c;
      std::array<int, 3> tri{na, nb, nc};
      std::sort(tri.begin(), tri.end());
      if (target_tris.count(tri)) return false;
      const Vec3 after =
          (pos(nb) - pos(na)).cross(pos(nc) - pos(na));
      if (after.norm() < 1e-14) return false;
      if (before.dot(after) <= 0.0) return false;
    }
    return true;
  }

  void collapse(int target, int gone) {
    for (int f : vfaces[static_cast<size_t>(gone)]) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      bool has_target = false;
      for (int k = 0; k < 3; ++k) has_target |= faces(f, k) == target;
      if (has_target) {
        face_alive[static_cast<size_t>(f)] = false;
      } else {
        for (int k = 0; k < 3; ++k)
          if (faces(f, k) == gone) faces(f, k) = target;
        vfaces[static_cast<size_t>(target)].push_back(f);
      }
    }
    vfaces[static_cast<size_t>(gone)].clear();
    vertex_alive[static_cast<size_t>(gone)] = false;
    quadric[static_cast<size_t>(target)] += quadric[static_cast<size_t>(gone)];
    --n_alive;
    ++stamp[static_cast<size_t>(gone)];
    ++stamp[static_cast<size_t>(target)];
    for (int n : neighbors(target)) push_candidate(target, n);
  }

  void run(int target_vertices) {
    while (n_alive > target_vertices && !heap.empty()) {
      const Candidate c = heap.top();
      heap.pop();
      if (!vertex_alive[static_cast<size_t>(c.u)] ||
          !vertex_alive[static_cast<size_t>(c.v)])
        continue;
      if (c.stamp_u != stamp[static_cast<size_t>(c.u)] ||
          c.stamp_v != stamp[static_cast<size_t>(c.v)])
        continue;
      const auto shared = faces_with_edge(c.u, c.v);
      if (shared.empty() || shared.size() > 2) continue;
      const int gone = c.target == c.u ? c.v : c.u;
      if (!collapse_ok(c.target, gone, shared)) continue;
      collapse(c.target, gone);
    }
    require(n_alive == target_vertices, "decimation blocked ",
            n_alive - target_vertices,
            " vertices above the target without breaking manifoldness");
  }

  DecimateResult extract() const {
    DecimateResult out;
    std::vector<int> remap(static_cast<size_t>(in.n_vertices()), -1);
    for (Eigen::Index v = 0; v < in.n_vertices(); ++v)
      if (vertex_alive[static_cast<size_t>(v)]) {
        remap[static_cast<size_t>(v)] = static_cast<int>(out.keep_map.size());
        out.keep_map.push_back(static_cast<int>(v));
      }
    out.mesh.vertices.resize(static_cast<Eigen::Index>(out.keep_map.size()), 3);
    for (size_t i = 0; i < out.keep_map.size(); ++i)
      out.mesh.vertices.row(static_cast<Eigen::Index>(i)) =
          in.vertices.row(out.keep_map[i]);
    std::vector<Eigen::RowVector3i> fs;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
      if (!face_alive[static_cast<size_t>(f)]) continue;
      fs.push_back({remap[static_cast<size_t>(faces(f, 0))],
                    remap[static_cast<size_t>(faces(f, 1))],
                    remap[static_cast<size_t>(faces(f, 2))]});
    }
    out.mesh.faces.resize(static_cast<Eigen::Index>(fs.size()), 3);
    for (size_t i = 0; i < fs.size(); ++i)
      out.mesh.faces.row(static_cast<Eigen::Index>(i)) = fs[i];
    mesh::validate(out.mesh);
    return out;
  }
};

}  // namespace

DecimateResult decimate(const mesh::TriMesh& input, int target_vertices) {
  require(target_vertices >= 1, "target vertex count must be positive");
  require(target_vertices <= input.n_vertices(),
          "target (", target_vertices, ") exceeds input size (",
          input.n_vertices(), ")");
  if (target_vertices == input.n_vertices()) {
    DecimateResult out;
    out.mesh = input;
    out.keep_map.resize(static_cast<size_t>(input.n_vertices()));
    for (size_t i = 0; i < out.keep_map.size(); ++i)
      out.keep_map[i] = static_cast<int>(i);
    return out;
  }
  Decimator d(input);
  d.run(target_vertices);
  return d.extract();
}

}  // namespace handrec::sampling
