#include "anticonc/qform_json.hpp"

#include <cmath>
#include <fstream>

#include "anticonc/error.hpp"

namespace anticonc {

nlohmann::json qform_to_json(const QForm& q) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < q.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < q.n; ++j) row.push_back(q.q22(i, j));
    rows.push_back(std::move(row));
  }
  return {{"n", q.n}, {"q11", q.q11}, {"q12", q.q12}, {"q22", std::move(rows)}};
}

QForm qform_from_json(const nlohmann::json& j) {
  try {
    const auto n_signed = j.at("n").get<long long>();
    if (n_signed < 0) throw InputError("qform: n must be non-negative");
    const auto n = static_cast<std::size_t>(n_signed);
    const double q11 = j.at("q11").get<double>();
    Vector q12 = j.at("q12").get<Vector>();
    const auto rows = j.at("q22").get<std::vector<Vector>>();
    if (q12.size() != n || rows.size() != n)
      throw InputError("qform: q12/q22 sizes do not match n");
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const Vector& row : rows) {
      if (row.size() != n) throw InputError("qform: q22 is not n x n");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    if (!std::isfinite(q11)) throw InputError("qform: non-finite q11");
    for (double v : q12)
      if (!std::isfinite(v)) throw InputError("qform: non-finite q12");
    return QForm(q11, std::move(q12),
                 SymMat::from_row_major(n, flat, kJsonAsymmetryTol));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("qform: ") + e.what());
  }
}

QForm load_qform(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return qform_from_json(j);
}

void save_qform(const QForm& q, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << qform_to_json(q).dump(2) << '\n';
}

}  // namespace anticonc
