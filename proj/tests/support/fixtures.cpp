#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "handrec/common/rng.hpp"
#include "handrec/mesh/obj_io.hpp"

namespace handrec::testing {

using mesh::Faces;
using mesh::TriMesh;
using mesh::Vertices;

TriMesh make_triangle() {
  Vertices v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Faces f(1, 3);
  f << 0, 1, 2;
  return mesh::make_trimesh(v, f);
}

TriMesh make_tetrahedron() {
  Vertices v(4, 3);
  v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  Faces f(4, 3);
  f << 0, 2, 1, 0, 1, 3, 0, 3, 2, 1, 2, 3;
  return mesh::make_trimesh(v, f);
}

TriMesh make_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Vertices v(12, 3);
  v << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0, 0, -1, t, 0, 1, t, 0, -1, -t,
      0, 1, -t, t, 0, -1, t, 0, 1, -t, 0, -1, -t, 0, 1;
  Faces f(20, 3);
  f << 0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11, 1, 5, 9, 5, 11, 4, 11,
      10, 2, 10, 7, 6, 7, 1, 8, 3, 9, 4, 3, 4, 2, 3, 2, 6, 3, 6, 8, 3, 8, 9,
      4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9, 8, 1;
  return mesh::make_trimesh(v, f);
}

TriMesh make_icosphere(int subdiv) {
  TriMesh m = make_icosahedron();
  m.vertices.rowwise().normalize();
  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    std::vector<Eigen::RowVector3d> verts;
    for (Eigen::Index i = 0; i < m.n_vertices(); ++i)
      verts.push_back(m.vertices.row(i));
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::RowVector3d p = (verts[a] + verts[b]).normalized();
      verts.push_back(p);
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<Eigen::RowVector3i> faces;
    for (Eigen::Index fi = 0; fi < m.n_faces(); ++fi) {
      const int a = m.faces(fi, 0), b = m.faces(fi, 1), c = m.faces(fi, 2);
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      faces.push_back({a, ab, ca});
      faces.push_back({b, bc, ab});
      faces.push_back({c, ca, bc});
      faces.push_back({ab, bc, ca});
    }
    m.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i)
      m.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
    m.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t i = 0; i < faces.size(); ++i)
      m.faces.row(static_cast<Eigen::Index>(i)) = faces[i];
  }
  mesh::validate(m);
  return m;
}

TriMesh make_grid(int nx, int ny) {
  Vertices v(static_cast<Eigen::Index>(nx) * ny, 3);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      v.row(static_cast<Eigen::Index>(j) * nx + i)
          << static_cast<double>(i), static_cast<double>(j), 0.0;
  Faces f(static_cast<Eigen::Index>(nx - 1) * (ny - 1) * 2, 3);
  Eigen::Index fi = 0;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i, b = j * nx + i + 1;
      const int c = (j + 1) * nx + i + 1, d = (j + 1) * nx + i;
      f.row(fi++) << a, b, c;
      f.row(fi++) << a, c, d;
    }
  return mesh::make_trimesh(v, f);
}

TriMesh shuffle_faces(const TriMesh& m, std::uint64_t seed) {
  std::vector<int> order(static_cast<size_t>(m.n_faces()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  TriMesh out = m;
  for (size_t i = 0; i < order.size(); ++i)
    out.faces.row(static_cast<Eigen::Index>(i)) = m.faces.row(order[i]);
  return out;
}

std::string temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("handrec_test_" + tag + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string write_temp_obj(const TriMesh& m, const std::string& tag) {
  const std::string path = temp_dir(tag) + "/mesh.obj";
  mesh::save_mesh(m, path);
  return path;
}

}  // namespace handrec::testing
