#include "handrec/spiral/spiral.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "handrec/common/error.hpp"
#include "handrec/common/rng.hpp"

namespace handrec::spiral {

std::vector<std::vector<int>> compute_rings(const mesh::VertexAdjacency& adj,
                                            int v, int k) {
  require(v >= 0 && v < adj.n_vertices(), "vertex ", v, " out of range");
  require(k >= 0, "ring radius must be nonnegative");

  std::vector<std::vector<int>> rings;
  rings.push_back({v});
  std::unordered_set<int> disk{v};
  for (int depth = 1; depth <= k; ++depth) {
    std::vector<int> ring;
    for (int u : rings[depth - 1])
      for (int w : adj.rings[u])
        if (!disk.count(w)) {
          disk.insert(w);
          ring.push_back(w);
        }
    std::sort(ring.begin(), ring.end());
    rings.push_back(std::move(ring));
  }
  return rings;
}

namespace {

// Sweeps the layer `target` in ring order: walks the ordered previous ring
// and appends each vertex's unvisited layer members, rotating each cyclic
// neighbor list to continue past the previously swept ring vertex.
std::vector<int> order_ring(const mesh::VertexAdjacency& adj,
                            const std::vector<int>& prev_ordered,
                            const std::unordered_set<int>& layer) {
  std::vector<int> out;
  out.reserve(layer.size());
  std::unordered_set<int> taken;

  for (size_t i = 0; i < prev_ordered.size() && taken.size() < layer.size();
       ++i) {
    const int u = prev_ordered[i];
    const std::vector<int>& ring = adj.rings[u];
    if (ring.empty()) continue;

    size_t start = 0;
    if (i == 0) {
      // Ring start rule: first unvisited neighbor of the previous ring's
      // start; ties broken by smallest vertex index.
      int best = -1;
      size_t best_pos = 0;
      for (size_t p = 0; p < ring.size(); ++p) {
        const int w = ring[p];
        if (layer.count(w) && !taken.count(w) && (best < 0 || w < best)) {
          best = w;
          best_pos = p;
        }
      }
      if (best < 0) continue;
      start = best_pos;
    } else {
      // Continue the sweep just past the previous ring vertex.
      auto it = std::find(ring.begin(), ring.end(), prev_ordered[i - 1]);
      start = it == ring.end() ? 0 : (it - ring.begin() + 1) % ring.size();
    }
    for (size_t p = 0; p < ring.size(); ++p) {
      const int w = ring[(start + p) % ring.size()];
      if (layer.count(w) && !taken.count(w)) {
        taken.insert(w);
        out.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace

SpiralTable build_spiral_table(const mesh::VertexAdjacency& adj, int k,
                               int length, std::uint64_t seed) {
  require(length >= 1, "spiral length must be >= 1");
  require(k >= 0, "disk radius must be >= 0");
  const Eigen::Index nv = adj.n_vertices();

  SpiralTable table;
  table.length = length;
  table.k = k;
  table.seed = seed;
  table.spirals.setConstant(nv, length, kPad);

  for (Eigen::Index v = 0; v < nv; ++v) {
    std::vector<int> spiral{static_cast<int>(v)};

    std::vector<int> ring1 = adj.rings[v];
    if (!ring1.empty() && !adj.boundary[v]) {
      auto rng = make_rng(seed, static_cast<std::uint64_t>(v));
      const size_t shift = rng() % ring1.size();
      std::rotate(ring1.begin(), ring1.begin() + shift, ring1.end());
    }
    spiral.insert(spiral.end(), ring1.begin(), ring1.end());

    std::vector<int> prev = ring1;
    auto layered = compute_rings(adj, static_cast<int>(v), k);
    for (int depth = 2; depth <= k && !prev.empty(); ++depth) {
      std::unordered_set<int> layer(layered[depth].begin(),
                                    layered[depth].end());
      if (layer.empty()) break;
      std::vector<int> ordered = order_ring(adj, prev, layer);
      spiral.insert(spiral.end(), ordered.begin(), ordered.end());
      prev = std::move(ordered);
    }

    const int n = std::min<int>(length, static_cast<int>(spiral.size()));
    for (int i = 0; i < n; ++i) table.spirals(v, i) = spiral[i];
  }
  return table;
}

int default_spiral_length(const mesh::VertexAdjacency& adj, int k) {
  double total = 0;
  for (const auto& ring : adj.rings) total += static_cast<double>(ring.size());
  const double valence = adj.n_vertices() ? total / adj.n_vertices() : 0.0;
  double expected = 1.0;
  for (int depth = 1; depth <= k; ++depth) expected += depth * valence;
  return static_cast<int>(std::ceil(expected));
}

Matrix spiral_gather(const Matrix& features, const SpiralTable& table) {
  require(features.rows() == table.n_vertices(),
          "feature rows (", features.rows(), ") != spiral rows (",
          table.n_vertices(), ")");
  const Eigen::Index d = features.cols();
  const Eigen::Index L = table.length;
  Matrix out = Matrix::Zero(table.n_vertices(), L * d);
  for (Eigen::Index v = 0; v < table.n_vertices(); ++v)
    for (Eigen::Index l = 0; l < L; ++l) {
      const int src = table.spirals(v, l);
      if (src != kPad) out.block(v, l * d, 1, d) = features.row(src);
    }
  return out;
}

Matrix spiral_conv(const Matrix& features, const SpiralTable& table,
                   const Matrix& weights, const Eigen::VectorXd& bias) {
  const Eigen::Index d = features.cols();
  require(weights.rows() == table.length * d, "spiral_conv: weights have ",
          weights.rows(), " rows, expected L*d_in = ", table.length * d);
  require(bias.size() == weights.cols(),
          "spiral_conv: bias size != output channels");
  Matrix out = spiral_gather(features, table) * weights;
  out.rowwise() += bias.transpose();
  return out;
}

std::string to_json(const SpiralTable& table) {
  nlohmann::json j;
  j["k"] = table.k;
  j["L"] = table.length;
  j["seed"] = table.seed;
  auto rows = nlohmann::json::array();
  for (Eigen::Index v = 0; v < table.n_vertices(); ++v) {
    auto row = nlohmann::json::array();
    for (int l = 0; l < table.length; ++l) row.push_back(table.spirals(v, l));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

SpiralTable spiral_table_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SpiralTable table;
  table.k = j.at("k").get<int>();
  table.length = j.at("L").get<int>();
  table.seed = j.at("seed").get<std::uint64_t>();
  const auto& rows = j.at("rows");
  table.spirals.setConstant(static_cast<Eigen::Index>(rows.size()),
                            table.length, kPad);
  for (Eigen::Index v = 0; v < table.spirals.rows(); ++v) {
    const auto& row = rows[static_cast<size_t>(v)];
    require(static_cast<int>(row.size()) == table.length,
            "spiral table row ", v, " has wrong length");
    for (int l = 0; l < table.length; ++l)
      table.spirals(v, l) = row[static_cast<size_t>(l)].get<int>();
  }
  return table;
}

void save_spiral_table(const SpiralTable& table, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open ", path, " for writing");
  out << to_json(table);
  require(out.good(), "I/O failure while writing ", path);
}

SpiralTable load_spiral_table(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open spiral table ", path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return spiral_table_from_json(text);
}

}  // namespace handrec::spiral
