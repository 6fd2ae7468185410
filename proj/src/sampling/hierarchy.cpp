#include "handrec/sampling/hierarchy.hpp"

#include <algorithm>
#include <filesystem>

#include "handrec/common/error.hpp"
#include "handrec/common/json_util.hpp"
#include "handrec/mesh/obj_io.hpp"
#include "handrec/sampling/qem.hpp"
#include "handrec/sampling/upsample.hpp"

namespace handrec::sampling {

std::vector<int> level_sizes(int n_vertices, int levels) {
  require(levels >= 2, "a hierarchy needs at least 2 levels, got ", levels);
  static const std::vector<int> reference{778, 392, 197, 100, 51};
  std::vector<int> sizes{n_vertices};
  for (int i = 1; i < levels; ++i) {
    int next;
    if (n_vertices == reference[0] && i < static_cast<int>(reference.size()))
      next = reference[static_cast<size_t>(i)];
    else
      next = (sizes.back() + 1) / 2;  // ceil halving
    require(next >= 4, "level ", i, " would have ", next,
            " vertices; too few to stay a surface");
    sizes.push_back(next);
  }
  return sizes;  // finest first
}

MeshHierarchy build_hierarchy(const mesh::TriMesh& finest, int levels) {
  const auto sizes = level_sizes(static_cast<int>(finest.n_vertices()), levels);

  MeshHierarchy h;
  std::vector<mesh::TriMesh> meshes{finest};  // finest first while building
  std::vector<std::vector<int>> keeps;
  std::vector<Eigen::SparseMatrix<double>> ups;
  for (size_t i = 1; i < sizes.size(); ++i) {
    DecimateResult d = decimate(meshes.back(), sizes[i]);
    ups.push_back(build_upsample(meshes.back(), d.mesh, d.keep_map));
    keeps.push_back(std::move(d.keep_map));
    meshes.push_back(std::move(d.mesh));
  }
  std::reverse(meshes.begin(), meshes.end());
  std::reverse(keeps.begin(), keeps.end());
  std::reverse(ups.begin(), ups.end());
  h.levels = std::move(meshes);
  h.keep_maps = std::move(keeps);
  h.upsample_mats = std::move(ups);
  return h;
}

void save_hierarchy(const MeshHierarchy& h, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < h.n_levels(); ++i)
    mesh::save_mesh(h.levels[static_cast<size_t>(i)],
                    dir + "/level_" + std::to_string(i) + ".obj");
  for (size_t i = 0; i < h.keep_maps.size(); ++i) {
    save_json(nlohmann::json(h.keep_maps[i]),
              dir + "/keep_" + std::to_string(i) + ".json");
    save_json(sparse_to_json(h.upsample_mats[i]),
              dir + "/upsample_" + std::to_string(i) + ".json");
  }
}

MeshHierarchy load_hierarchy(const std::string& dir) {
  MeshHierarchy h;
  for (int i = 0;; ++i) {
    const std::string path = dir + "/level_" + std::to_string(i) + ".obj";
    if (!std::filesystem::exists(path)) break;
    h.levels.push_back(mesh::load_mesh(path));
  }
  require(h.n_levels() >= 2, dir, " does not contain a mesh hierarchy");
  for (int i = 0; i + 1 < h.n_levels(); ++i) {
    h.keep_maps.push_back(
        load_json(dir + "/keep_" + std::to_string(i) + ".json")
            .get<std::vector<int>>());
    h.upsample_mats.push_back(sparse_from_json(
        load_json(dir + "/upsample_" + std::to_string(i) + ".json")));
  }
  return h;
}

}  // namespace handrec::sampling
