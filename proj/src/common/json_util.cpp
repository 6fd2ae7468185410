#include "handrec/common/json_util.hpp"

#include <fstream>

#include "handrec/common/error.hpp"

namespace handrec {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open ", path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(path, ": JSON parse error: ", e.what());
  }
  return j;
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open ", path, " for writing");
  out << j.dump(2) << '\n';
  require(out.good(), "I/O failure while writing ", path);
}

nlohmann::json sparse_to_json(const Eigen::SparseMatrix<double>& m) {
  nlohmann::json j;
  auto rows = nlohmann::json::array();
  auto cols = nlohmann::json::array();
  auto vals = nlohmann::json::array();
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      rows.push_back(it.row());
      cols.push_back(it.col());
      vals.push_back(it.value());
    }
  j["rows"] = std::move(rows);
  j["cols"] = std::move(cols);
  j["vals"] = std::move(vals);
  j["shape"] = {m.rows(), m.cols()};
  return j;
}

Eigen::SparseMatrix<double> sparse_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("rows");
  const auto& cols = j.at("cols");
  const auto& vals = j.at("vals");
  require(rows.size() == cols.size() && cols.size() == vals.size(),
          "triplet arrays have mismatched lengths");
  Eigen::SparseMatrix<double> m(j.at("shape")[0].get<Eigen::Index>(),
                                j.at("shape")[1].get<Eigen::Index>());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i)
    triplets.emplace_back(rows[i].get<int>(), cols[i].get<int>(),
                          vals[i].get<double>());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace handrec
