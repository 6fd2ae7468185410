#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace handrec::mesh {

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Triangle mesh with counter-clockwise face winding. Vertex positions are in
// model units (1 unit = 1 mm for hand-scale assets). Immutable by convention
// once built; treat instances as values.
struct TriMesh {
  Vertices vertices;
  Faces faces;

  Eigen::Index n_vertices() const { return vertices.rows(); }
  Eigen::Index n_faces() const { return faces.rows(); }
};

// Validates the structural invariants (index ranges, no degenerate faces,
// every directed edge used at most once, i.e. <=2 faces per undirected edge
// and consistent winding). Throws handrec::Error on violation.
void validate(const TriMesh& mesh);

TriMesh make_trimesh(Vertices vertices, Faces faces);

// One-ring neighborhoods in cyclic order induced by the face winding.
// Interior vertices get a closed cycle (stored rotated so the smallest
// neighbor index comes first, which makes the result independent of face
// enumeration order); boundary vertices get an open chain starting at the
// boundary end with no predecessor.
struct VertexAdjacency {
  std::vector<std::vector<int>> rings;
  std::vector<bool> boundary;

  Eigen::Index n_vertices() const {
    return static_cast<Eigen::Index>(rings.size());
  }
};

// Throws on non-manifold vertices (more than one fan) identifying the vertex.
VertexAdjacency build_adjacency(const TriMesh& mesh);

// Undirected edges (i < j), sorted lexicographically. Each edge appears once.
std::vector<std::pair<int, int>> edge_set(const TriMesh& mesh);

// Edges as an E x 2 index matrix, same order as edge_set.
Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> edge_matrix(
    const TriMesh& mesh);

}  // namespace handrec::mesh
