#pragma once

#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>
#include <string>

namespace handrec {

nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

// Sparse matrices as triplet lists: {"rows":[...],"cols":[...],"vals":[...],
// "shape":[m,n]}.
nlohmann::json sparse_to_json(const Eigen::SparseMatrix<double>& m);
Eigen::SparseMatrix<double> sparse_from_json(const nlohmann::json& j);

template <typename Derived>
nlohmann::json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace handrec
