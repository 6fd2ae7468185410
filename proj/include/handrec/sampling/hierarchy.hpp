#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::sampling {

// Decimation pyramid ordered coarsest to finest. Entry i of keep_maps /
// upsample_mats relates levels[i] (coarse) and levels[i+1] (fine):
// upsample_mats[i] has shape n_{i+1} x n_i.
struct MeshHierarchy {
  std::vector<mesh::TriMesh> levels;
  std::vector<std::vector<int>> keep_maps;
  std::vector<Eigen::SparseMatrix<double>> upsample_mats;

  int n_levels() const { return static_cast<int>(levels.size()); }
  const mesh::TriMesh& finest() const { return levels.back(); }
  const mesh::TriMesh& coarsest() const { return levels.front(); }
};

// Per-level target sizes. Vertex counts halve (ceil) per level; the
// 778-vertex reference template is pinned to {778, 392, 197, 100, 51}.
std::vector<int> level_sizes(int n_vertices, int levels);

MeshHierarchy build_hierarchy(const mesh::TriMesh& finest, int levels);

// Directory layout: level_i.obj (i = 0 coarsest), keep_i.json,
// upsample_i.json for each adjacent pair.
void save_hierarchy(const MeshHierarchy& h, const std::string& dir);
MeshHierarchy load_hierarchy(const std::string& dir);

}  // namespace handrec::sampling
