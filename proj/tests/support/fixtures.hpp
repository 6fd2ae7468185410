#pragma once

#include <cstdint>
#include <string>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::testing {

mesh::TriMesh make_triangle();
mesh::TriMesh make_tetrahedron();
mesh::TriMesh make_icosahedron();

// Icosahedron subdivided `subdiv` times and projected to the unit sphere.
mesh::TriMesh make_icosphere(int subdiv);

// Triangulated planar grid in the xy-plane, nx * ny vertices, CCW winding
// seen from +z. Interior vertices have valence 6.
mesh::TriMesh make_grid(int nx, int ny);

// Random shuffle of the face list (keeps winding), for determinism tests.
mesh::TriMesh shuffle_faces(const mesh::TriMesh& m, std::uint64_t seed);

std::string write_temp_obj(const mesh::TriMesh& m, const std::string& tag);

// Unique scratch directory under the system temp dir, created on call.
std::string temp_dir(const std::string& tag);

}  // namespace handrec::testing
