#include "handrec/mesh/obj_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "handrec/common/error.hpp"

namespace handrec::mesh {

namespace {

// Accepts `i`, `i/t`, `i/t/n`, `i//n`; only the vertex index is used.
int parse_face_index(const std::string& token, Eigen::Index n_vertices,
                     const std::string& origin, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (const std::exception&) {
    fail(origin, ":", line_no, ": bad face index '", token, "'");
  }
  require(idx >= 1 && idx <= n_vertices, origin, ":", line_no,
          ": face index ", idx, " outside [1, ", n_vertices, "]");
  return idx - 1;
}

}  // namespace

TriMesh load_mesh_from(std::istream& in, const std::string& origin,
                       std::ostream* warnings) {
  std::vector<Eigen::RowVector3d> verts;
  std::vector<Eigen::RowVector3i> faces;
  std::string line;
  int line_no = 0;
  bool warned_other = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      require(static_cast<bool>(ls >> x >> y >> z), origin, ":", line_no,
              ": malformed vertex record");
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      require(tokens.size() == 3, origin, ":", line_no,
              ": face has ", tokens.size(), " vertices, expected 3");
      Eigen::RowVector3i f;
      for (int k = 0; k < 3; ++k)
        f[k] = parse_face_index(tokens[k],
                                static_cast<Eigen::Index>(verts.size()),
                                origin, line_no);
      faces.push_back(f);
    } else if (warnings && !warned_other) {
      *warnings << origin << ":" << line_no << ": ignoring '" << tag
                << "' records\n";
      warned_other = true;
    }
  }

  TriMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i)
    mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i)
    mesh.faces.row(static_cast<Eigen::Index>(i)) = faces[i];
  validate(mesh);
  return mesh;
}

TriMesh load_mesh(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path);
  require(in.good(), "cannot open mesh file ", path);
  return load_mesh_from(in, path, warnings);
}

void save_mesh_to(const TriMesh& mesh, std::ostream& out) {
  require(mesh.n_vertices() > 0, "refusing to save a mesh with no vertices");
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index v = 0; v < mesh.n_vertices(); ++v)
    out << "v " << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' '
        << mesh.vertices(v, 2) << '\n';
  for (Eigen::Index f = 0; f < mesh.n_faces(); ++f)
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
        << mesh.faces(f, 2) + 1 << '\n';
  require(out.good(), "I/O failure while writing mesh");
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open ", path, " for writing");
  save_mesh_to(mesh, out);
}

}  // namespace handrec::mesh
