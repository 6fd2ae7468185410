#pragma once

#include <iosfwd>
#include <string>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::mesh {

// ASCII OBJ, `v x y z` and `f i j k` records only. Faces must be triangles;
// indices are 1-based in the file and 0-based in memory. Other record types
// are skipped (a warning is written to the stream passed to load_mesh).
TriMesh load_mesh(const std::string& path, std::ostream* warnings = nullptr);
TriMesh load_mesh_from(std::istream& in, const std::string& origin,
                       std::ostream* warnings = nullptr);

void save_mesh(const TriMesh& mesh, const std::string& path);
void save_mesh_to(const TriMesh& mesh, std::ostream& out);

}  // namespace handrec::mesh
