#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::sampling {

struct TrianglePoint {
  Eigen::RowVector3d point;  // closest point on the (closed) triangle
  Eigen::Vector3d bary;      // barycentric coordinates, >= 0, summing to 1
};

// Exact closest point on triangle (a, b, c) to p.
TrianglePoint closest_point_on_triangle(const Eigen::RowVector3d& p,
                                        const Eigen::RowVector3d& a,
                                        const Eigen::RowVector3d& b,
                                        const Eigen::RowVector3d& c);

// Sparse m x n interpolation matrix with m = fine vertex count and
// n = coarse vertex count. Kept vertices (keep_map) get one-hot rows; every
// other fine vertex is projected onto its closest coarse triangle (brute
// force) and receives the clamped barycentric weights of the projection.
// Rows sum to 1 and have at most 3 nonzeros.
Eigen::SparseMatrix<double> build_upsample(const mesh::TriMesh& fine,
                                           const mesh::TriMesh& coarse,
                                           const std::vector<int>& keep_map);

}  // namespace handrec::sampling
