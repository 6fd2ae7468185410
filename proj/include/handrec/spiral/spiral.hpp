#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "handrec/mesh/trimesh.hpp"

namespace handrec::spiral {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kPad = -1;

// Per-vertex ordered neighbor sequences of fixed length. Row v starts at v,
// then lists the 1-ring, 2-ring, ... in traversal order; rows shorter than
// `length` are padded with kPad (gathers substitute the zero vector there).
struct SpiralTable {
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> spirals;
  int length = 0;
  int k = 0;
  std::uint64_t seed = 0;

  Eigen::Index n_vertices() const { return spirals.rows(); }
};

// rings[0] = {v}, rings[i] = vertices at graph distance exactly i, each
// sorted ascending. Rings beyond the component are empty.
std::vector<std::vector<int>> compute_rings(const mesh::VertexAdjacency& adj,
                                            int v, int k);

// Deterministic spiral construction: the 1-ring is traversed in the cyclic
// direction induced by face winding, starting at a neighbor chosen by a
// generator seeded from (seed, v) for interior vertices and at the chain head
// for boundary vertices. Each outer ring starts at the first unvisited
// neighbor of the previous ring's start (smallest index on ties) and is swept
// in the same direction. Spirals longer than `length` are truncated
// farthest-first; shorter ones are padded.
SpiralTable build_spiral_table(const mesh::VertexAdjacency& adj, int k,
                               int length, std::uint64_t seed);

// Default spiral length for a 2-disk: 1 + expected |1-ring| + |2-ring|,
// estimated from the mean valence (|2-ring| ~ 2 * valence on a regular
// triangulation), rounded up.
int default_spiral_length(const mesh::VertexAdjacency& adj, int k = 2);

// out has shape n_vertices x (L * d): row v is the concatenation of the
// feature rows along spiral v, zeros at pad slots.
Matrix spiral_gather(const Matrix& features, const SpiralTable& table);

// out[v] = flatten(gather(features)[v]) * weights + bias. weights has shape
// (L * d_in) x d_out, bias has d_out entries.
Matrix spiral_conv(const Matrix& features, const SpiralTable& table,
                   const Matrix& weights, const Eigen::VectorXd& bias);

// JSON round-trip: {"k":..,"L":..,"seed":..,"rows":[[..]]}; -1 pads.
std::string to_json(const SpiralTable& table);
SpiralTable spiral_table_from_json(const std::string& text);
void save_spiral_table(const SpiralTable& table, const std::string& path);
SpiralTable load_spiral_table(const std::string& path);

}  // namespace handrec::spiral
