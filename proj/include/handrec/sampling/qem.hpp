#pragma once

#include <vector>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::sampling {

struct DecimateResult {
  mesh::TriMesh mesh;
  // keep_map[i] = index in the input mesh of coarse vertex i. Strictly
  // increasing, so coarse vertex positions are a subset of the fine ones.
  std::vector<int> keep_map;
};

// Greedy quadric-error edge collapse, restricted to collapses into an
// existing endpoint so the coarse vertices stay a subset of the fine mesh.
// Boundary edges carry a x1000 constraint-plane penalty. Collapses that
// would create non-manifold topology, duplicate faces or flipped normals
// are skipped. Throws if the target cannot be reached, reporting how many
// vertices above target remain.
DecimateResult decimate(const mesh::TriMesh& input, int target_vertices);

}  // namespace handrec::sampling
