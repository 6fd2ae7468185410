#include <doctest.h>

#include <random>
#include <set>

#include "handrec/common/error.hpp"
#include "handrec/common/rng.hpp"
#include "handrec/spiral/spiral.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace handrec;
using namespace handrec::testing;

namespace {

spiral::Matrix random_matrix(Eigen::Index r, Eigen::Index c,
                             std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> dist;
  spiral::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("rings on the tetrahedron") {
  auto m = make_tetrahedron();
  auto adj = mesh::build_adjacency(m);
  auto rings = spiral::compute_rings(adj, 0, 1);
  REQUIRE(rings.size() == 2);
  CHECK(rings[0] == std::vector<int>{0});
  CHECK(rings[1] == std::vector<int>{1, 2, 3});

  auto rings2 = spiral::compute_rings(adj, 0, 2);
  REQUIRE(rings2.size() == 3);
  CHECK(rings2[2].empty());  // diameter-1 graph
}

TEST_CASE("rings match BFS layers (tetrahedron, icosahedron, grid)") {
  for (const auto& m :
       {make_tetrahedron(), make_icosahedron(), make_grid(7, 7)}) {
    auto adj = mesh::build_adjacency(m);
    for (int v : {0, static_cast<int>(m.n_vertices()) / 2}) {
      auto rings = spiral::compute_rings(adj, v, 3);
      for (int d = 0; d <= 3; ++d) {
        std::set<int> got(rings[d].begin(), rings[d].end());
        CHECK(got == bfs_layer(m, v, d));
        CHECK(got.size() == rings[d].size());  // duplicate-free
      }
    }
  }
}

TEST_CASE("icosahedron 2-disk: |1-ring| = 5, |2-ring| = 5") {
  auto m = make_icosahedron();
  auto adj = mesh::build_adjacency(m);
  for (int v = 0; v < 12; ++v) {
    auto rings = spiral::compute_rings(adj, v, 2);
    CHECK(rings[1].size() == 5);
    CHECK(rings[2].size() == 5);
  }
}

TEST_CASE("compute_rings rejects bad vertex ids") {
  auto adj = mesh::build_adjacency(make_tetrahedron());
  CHECK_THROWS_AS(spiral::compute_rings(adj, 99, 1), Error);
}

TEST_CASE("spiral rows start at the vertex and respect ring order") {
  auto m = make_grid(7, 7);
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 16, 7);
  for (Eigen::Index v = 0; v < m.n_vertices(); ++v) {
    CHECK(table.spirals(v, 0) == v);
    const auto depth = bfs_depths(m, static_cast<int>(v));
    int last_depth = 0;
    bool padded = false;
    std::set<int> seen;
    for (int l = 0; l < table.length; ++l) {
      const int u = table.spirals(v, l);
      if (u == spiral::kPad) {
        padded = true;
        continue;
      }
      CHECK(!padded);  // pads only at the tail
      CHECK(!seen.count(u));
      seen.insert(u);
      CHECK(depth[static_cast<size_t>(u)] <= 2);   // inside the 2-disk
      CHECK(depth[static_cast<size_t>(u)] >= last_depth);  // ring order
      last_depth = depth[static_cast<size_t>(u)];
    }
  }
}

TEST_CASE("grid interior spiral: center + 6 + 9 of 12, no pads") {
  auto m = make_grid(7, 7);
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 16, 3);
  const int v = 3 * 7 + 3;  // center
  const auto depth = bfs_depths(m, v);
  CHECK(table.spirals(v, 0) == v);
  for (int l = 1; l <= 6; ++l)
    CHECK(depth[static_cast<size_t>(table.spirals(v, l))] == 1);
  for (int l = 7; l < 16; ++l)
    CHECK(depth[static_cast<size_t>(table.spirals(v, l))] == 2);
}

TEST_CASE("tetrahedron spiral pads beyond the 2-disk") {
  auto adj = mesh::build_adjacency(make_tetrahedron());
  auto table = spiral::build_spiral_table(adj, 2, 16, 5);
  for (int v = 0; v < 4; ++v) {
    CHECK(table.spirals(v, 0) == v);
    std::set<int> ring1(table.spirals.row(v).segment(1, 3).begin(),
                        table.spirals.row(v).segment(1, 3).end());
    CHECK(ring1.size() == 3);
    for (int l = 4; l < 16; ++l) CHECK(table.spirals(v, l) == spiral::kPad);
  }
}

TEST_CASE("spiral table is deterministic under face shuffling") {
  auto m = make_grid(6, 6);
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 14, 42);
  for (std::uint64_t s : {10ull, 20ull}) {
    auto adj2 = mesh::build_adjacency(shuffle_faces(m, s));
    auto table2 = spiral::build_spiral_table(adj2, 2, 14, 42);
    CHECK(table.spirals == table2.spirals);
  }
  // Different seed is allowed to pick a different first neighbor.
  auto table3 = spiral::build_spiral_table(adj, 2, 14, 43);
  CHECK(table3.spirals.col(0) == table.spirals.col(0));
}

TEST_CASE("default spiral length from mean valence") {
  auto adj = mesh::build_adjacency(make_grid(7, 7));
  const int L = spiral::default_spiral_length(adj, 2);
  // Mean valence of the 7x7 grid is below 6, so the estimate stays modest.
  CHECK(L >= 10);
  CHECK(L <= 19);
}

TEST_CASE("gather: one-hot features select spiral entries") {
  auto m = make_icosahedron();
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 11, 1);
  spiral::Matrix eye = spiral::Matrix::Identity(12, 12);
  auto out = spiral_gather(eye, table);
  for (Eigen::Index v = 0; v < 12; ++v) {
    for (Eigen::Index c = 0; c < 12; ++c)
      CHECK(out(v, c) == (c == v ? 1.0 : 0.0));
  }
}

TEST_CASE("gather: pad slots produce zero blocks") {
  auto adj = mesh::build_adjacency(make_tetrahedron());
  auto table = spiral::build_spiral_table(adj, 2, 8, 1);
  auto feats = random_matrix(4, 3, 5);
  auto out = spiral_gather(feats, table);
  for (Eigen::Index v = 0; v < 4; ++v)
    for (int l = 4; l < 8; ++l)
      CHECK(out.block(v, l * 3, 1, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gather matches the naive loop oracle") {
  auto m = make_grid(5, 5);
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 12, 9);
  auto feats = random_matrix(m.n_vertices(), 4, 11);
  CHECK((spiral_gather(feats, table) - naive_gather(feats, table))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("gather rejects mismatched row counts") {
  auto adj = mesh::build_adjacency(make_tetrahedron());
  auto table = spiral::build_spiral_table(adj, 1, 4, 1);
  CHECK_THROWS_AS(spiral_gather(random_matrix(5, 2, 1), table), Error);
}

TEST_CASE("conv: delta kernel reproduces features") {
  auto m = make_icosahedron();
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 11, 2);
  const Eigen::Index d = 3;
  auto feats = random_matrix(12, d, 21);
  spiral::Matrix w = spiral::Matrix::Zero(table.length * d, d);
  w.topLeftCorner(d, d).setIdentity();  // pick position l = 0
  auto out = spiral_conv(feats, table, w, Eigen::VectorXd::Zero(d));
  CHECK((out - feats).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("conv: zero weights yield the bias in every row") {
  auto adj = mesh::build_adjacency(make_tetrahedron());
  auto table = spiral::build_spiral_table(adj, 2, 6, 2);
  Eigen::VectorXd bias(2);
  bias << 0.5, -1.25;
  auto out = spiral_conv(random_matrix(4, 3, 2), table,
                         spiral::Matrix::Zero(18, 2), bias);
  for (Eigen::Index v = 0; v < 4; ++v) {
    CHECK(out(v, 0) == 0.5);
    CHECK(out(v, 1) == -1.25);
  }
}

TEST_CASE("conv matches the sum-form oracle on 20 random instances") {
  auto m = make_grid(6, 6);
  auto adj = mesh::build_adjacency(m);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_rng(seed, 99);
    const int L = 6 + static_cast<int>(rng() % 10);
    const Eigen::Index d_in = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index d_out = 1 + static_cast<Eigen::Index>(rng() % 4);
    auto table = spiral::build_spiral_table(adj, 2, L, seed);
    auto feats = random_matrix(m.n_vertices(), d_in, seed * 3 + 1);
    auto w = random_matrix(L * d_in, d_out, seed * 3 + 2);
    Eigen::VectorXd bias =
        random_matrix(1, d_out, seed * 3 + 3).row(0).transpose();
    auto fast = spiral_conv(feats, table, w, bias);
    auto slow = naive_spiral_conv(feats, table, w, bias);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("conv is linear in the features (bias 0)") {
  auto m = make_grid(5, 5);
  auto adj = mesh::build_adjacency(m);
  auto table = spiral::build_spiral_table(adj, 2, 10, 4);
  auto f1 = random_matrix(m.n_vertices(), 3, 31);
  auto f2 = random_matrix(m.n_vertices(), 3, 32);
  auto w = random_matrix(30, 4, 33);
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(4);
  const double alpha = 2.75;
  const spiral::Matrix lhs = spiral_conv(alpha * f1 + f2, table, w, b0);
  const spiral::Matrix rhs = alpha * spiral_conv(f1, table, w, b0) +
                             spiral_conv(f2, table, w, b0);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spiral table JSON round trip") {
  auto adj = mesh::build_adjacency(make_icosahedron());
  auto table = spiral::build_spiral_table(adj, 2, 11, 77);
  auto back = spiral::spiral_table_from_json(spiral::to_json(table));
  CHECK(back.k == table.k);
  CHECK(back.length == table.length);
  CHECK(back.seed == table.seed);
  CHECK(back.spirals == table.spirals);
}
