#include "handrec/sampling/upsample.hpp"

#include <limits>

#include "handrec/common/error.hpp"

namespace handrec::sampling {

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
TrianglePoint closest_point_on_triangle(const Eigen::RowVector3d& p,
                                        const Eigen::RowVector3d& a,
                                        const Eigen::RowVector3d& b,
                                        const Eigen::RowVector3d& c) {
  const Eigen::RowVector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, {1, 0, 0}};

  const Eigen::RowVector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, {0, 1, 0}};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return {a + t * ab, {1 - t, t, 0}};
  }

  const Eigen::RowVector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, {0, 0, 1}};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return {a + t * ac, {1 - t, 0, t}};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + t * (c - b), {0, 1 - t, t}};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {a + v * ab + w * ac, {1 - v - w, v, w}};
}

Eigen::SparseMatrix<double> build_upsample(const mesh::TriMesh& fine,
                                           const mesh::TriMesh& coarse,
                                           const std::vector<int>& keep_map) {
  require(coarse.n_vertices() > 0 && coarse.n_faces() > 0,
          "build_upsample: empty coarse mesh");
  require(static_cast<Eigen::Index>(keep_map.size()) == coarse.n_vertices(),
          "build_upsample: keep_map size != coarse vertex count");

  std::vector<int> coarse_of(static_cast<size_t>(fine.n_vertices()), -1);
  for (size_t i = 0; i < keep_map.size(); ++i) {
    require(keep_map[i] >= 0 && keep_map[i] < fine.n_vertices(),
            "build_upsample: keep_map entry out of range");
    coarse_of[static_cast<size_t>(keep_map[i])] = static_cast<int>(i);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index q = 0; q < fine.n_vertices(); ++q) {
    const int kept = coarse_of[static_cast<size_t>(q)];
    if (kept >= 0) {
      triplets.emplace_back(static_cast<int>(q), kept, 1.0);
      continue;
    }
    const Eigen::RowVector3d p = fine.vertices.row(q);
    double best = std::numeric_limits<double>::infinity();
    TrianglePoint best_tp;
    Eigen::Index best_face = 0;
    for (Eigen::Index f = 0; f < coarse.n_faces(); ++f) {
      const TrianglePoint tp = closest_point_on_triangle(
          p, coarse.vertices.row(coarse.faces(f, 0)),
          coarse.vertices.row(coarse.faces(f, 1)),
          coarse.vertices.row(coarse.faces(f, 2)));
      const double d = (tp.point - p).squaredNorm();
      if (d < best) {
        best = d;
        best_tp = tp;
        best_face = f;
      }
    }
    for (int k = 0; k < 3; ++k)
      if (best_tp.bary[k] > 0.0)
        triplets.emplace_back(static_cast<int>(q), coarse.faces(best_face, k),
                              best_tp.bary[k]);
  }

  Eigen::SparseMatrix<double> up(fine.n_vertices(), coarse.n_vertices());
  up.setFromTriplets(triplets.begin(), triplets.end());
  up.makeCompressed();
  return up;
}

}  // namespace handrec::sampling
