#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "handrec/common/error.hpp"
#include "handrec/mesh/obj_io.hpp"
#include "handrec/mesh/trimesh.hpp"
#include "support/fixtures.hpp"

using namespace handrec;
using namespace handrec::testing;

namespace {

// Independent adjacency oracle: neighbor sets straight from the face list.
std::set<int> neighbor_set(const mesh::TriMesh& m, int v) {
  std::set<int> out;
  for (Eigen::Index f = 0; f < m.n_faces(); ++f)
    for (int k = 0; k < 3; ++k) {
      const int a = m.faces(f, k), b = m.faces(f, (k + 1) % 3);
      if (a == v) out.insert(b);
      if (b == v) out.insert(a);
    }
  return out;
}

bool is_face_of(const mesh::TriMesh& m, int a, int b, int c) {
  for (Eigen::Index f = 0; f < m.n_faces(); ++f) {
    const int x = m.faces(f, 0), y = m.faces(f, 1), z = m.faces(f, 2);
    if ((x == a && y == b && z == c) || (x == b && y == c && z == a) ||
        (x == c && y == a && z == b))
      return true;
  }
  return false;
}

bool cyclically_equal(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (size_t s = 0; s < a.size(); ++s) {
    bool ok = true;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[(s + i) % a.size()] != b[i]) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("single-triangle OBJ parses") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  auto m = mesh::load_mesh_from(in, "tri.obj");
  CHECK(m.n_vertices() == 3);
  CHECK(m.n_faces() == 1);
}

TEST_CASE("tetrahedron adjacency is K4") {
  auto m = make_tetrahedron();
  auto adj = mesh::build_adjacency(m);
  for (int v = 0; v < 4; ++v) {
    CHECK(adj.rings[v].size() == 3);
    CHECK(!adj.boundary[v]);
    CHECK(std::set<int>(adj.rings[v].begin(), adj.rings[v].end()) ==
          neighbor_set(m, v));
  }
  // Cyclic order must follow the face winding: consecutive ring entries and
  // the center always form an oriented face.
  for (int v = 0; v < 4; ++v) {
    const auto& ring = adj.rings[v];
    for (size_t i = 0; i < ring.size(); ++i)
      CHECK(is_face_of(m, v, ring[i], ring[(i + 1) % ring.size()]));
  }
}

TEST_CASE("icosahedron: valence 5, 30 edges, Euler characteristic 2") {
  auto m = make_icosahedron();
  auto adj = mesh::build_adjacency(m);
  for (int v = 0; v < 12; ++v) CHECK(adj.rings[v].size() == 5);
  const auto edges = mesh::edge_set(m);
  CHECK(edges.size() == 30);
  CHECK(m.n_vertices() - static_cast<Eigen::Index>(edges.size()) +
            m.n_faces() ==
        2);
}

TEST_CASE("tetrahedron: V - E + F = 2 and 6 edges") {
  auto m = make_tetrahedron();
  CHECK(mesh::edge_set(m).size() == 6);
}

TEST_CASE("single triangle has 3 edges") {
  CHECK(mesh::edge_set(make_triangle()).size() == 3);
}

TEST_CASE("grid adjacency: interior 6-cycle, corner open chain") {
  auto m = make_grid(5, 5);
  auto adj = mesh::build_adjacency(m);
  const int interior = 2 * 5 + 2;  // (2,2)
  CHECK(adj.rings[interior].size() == 6);
  CHECK(!adj.boundary[interior]);
  const int corner = 0;
  CHECK(adj.boundary[corner]);
  CHECK(adj.rings[corner].size() == neighbor_set(m, corner).size());
  // Open chain: consecutive entries are joined by a face through the corner.
  const auto& chain = adj.rings[corner];
  for (size_t i = 0; i + 1 < chain.size(); ++i)
    CHECK(is_face_of(m, corner, chain[i], chain[i + 1]));
}

TEST_CASE("adjacency is stable under face shuffling") {
  auto m = make_grid(5, 5);
  auto adj = mesh::build_adjacency(m);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto adj2 = mesh::build_adjacency(shuffle_faces(m, seed));
    for (Eigen::Index v = 0; v < m.n_vertices(); ++v) {
      CHECK(cyclically_equal(adj.rings[v], adj2.rings[v]));
      CHECK(adj.boundary[v] == adj2.boundary[v]);
      if (!adj.boundary[v])  // canonical rotation makes rings exactly equal
        CHECK(adj.rings[v] == adj2.rings[v]);
    }
  }
}

TEST_CASE("save/load round trip") {
  auto m = make_icosahedron();
  const auto path = write_temp_obj(m, "roundtrip");
  auto m2 = mesh::load_mesh(path);
  CHECK(m2.n_vertices() == m.n_vertices());
  CHECK((m2.vertices - m.vertices).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(m2.faces == m.faces);
}

TEST_CASE("vertex count preserved in OBJ output") {
  auto m = make_grid(2, 389);  // 778 vertices
  REQUIRE(m.n_vertices() == 778);
  const auto path = write_temp_obj(m, "count");
  std::ifstream in(path);
  std::string line;
  int v_lines = 0;
  while (std::getline(in, line))
    if (line.rfind("v ", 0) == 0) ++v_lines;
  CHECK(v_lines == 778);
}

TEST_CASE("saving an empty mesh fails") {
  mesh::TriMesh empty;
  empty.vertices.resize(0, 3);
  empty.faces.resize(0, 3);
  std::ostringstream out;
  CHECK_THROWS_AS(mesh::save_mesh_to(empty, out), Error);
}

TEST_CASE("parser rejects malformed input with line numbers") {
  SUBCASE("non-triangular face") {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n");
    CHECK_THROWS_WITH_AS(mesh::load_mesh_from(in, "quad.obj"),
                         doctest::Contains("quad.obj:5"), Error);
  }
  SUBCASE("out-of-range index") {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
    CHECK_THROWS_WITH_AS(mesh::load_mesh_from(in, "oob.obj"),
                         doctest::Contains("oob.obj:4"), Error);
  }
  SUBCASE("bad vertex record") {
    std::istringstream in("v 0 0\n");
    CHECK_THROWS_AS(mesh::load_mesh_from(in, "bad.obj"), Error);
  }
}

TEST_CASE("other record types are skipped with a warning") {
  std::istringstream in(
      "vn 0 0 1\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3\n");
  std::ostringstream warn;
  auto m = mesh::load_mesh_from(in, "tex.obj", &warn);
  CHECK(m.n_faces() == 1);
  CHECK(warn.str().find("vn") != std::string::npos);
}

TEST_CASE("inconsistent winding and non-manifold inputs are rejected") {
  SUBCASE("duplicated directed edge (flipped winding)") {
    mesh::Vertices v(4, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
    mesh::Faces f(2, 3);
    f << 0, 1, 2, 0, 1, 3;  // both faces traverse 0->1
    mesh::TriMesh bad{v, f};
    CHECK_THROWS_AS(mesh::validate(bad), Error);
  }
  SUBCASE("three faces on one edge") {
    mesh::Vertices v(5, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;
    mesh::Faces f(3, 3);
    f << 0, 1, 2, 1, 0, 3, 0, 1, 4;
    mesh::TriMesh bad{v, f};
    CHECK_THROWS_AS(mesh::validate(bad), Error);
  }
  SUBCASE("bowtie vertex (two fans) identifies the vertex") {
    // Two triangles meeting only at vertex 0.
    mesh::Vertices v(5, 3);
    v << 0, 0, 0, 1, 0, 0, 1, 1, 0, -1, 0, 0, -1, -1, 0;
    mesh::Faces f(2, 3);
    f << 0, 1, 2, 0, 3, 4;
    mesh::TriMesh bowtie{v, f};
    CHECK_THROWS_WITH_AS(mesh::build_adjacency(bowtie),
                         doctest::Contains("vertex 0"), Error);
  }
  SUBCASE("degenerate face") {
    mesh::Vertices v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    mesh::Faces f(1, 3);
    f << 0, 1, 1;
    mesh::TriMesh bad{v, f};
    CHECK_THROWS_AS(mesh::validate(bad), Error);
  }
}

TEST_CASE("edge_set is sorted and unique") {
  auto m = make_grid(4, 4);
  auto edges = mesh::edge_set(m);
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    CHECK(edges[i] < edges[i + 1]);
    CHECK(edges[i].first < edges[i].second);
  }
}
