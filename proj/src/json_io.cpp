#include "conecert/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace conecert {

namespace {

Complex scalar_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    throw InputError("expected a complex scalar encoded as [re, im]");
  }
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw InputError("non-finite complex scalar");
  }
  return {re, im};
}

Json scalar_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Eigen::Index positive_size(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw InputError(std::string("missing integer field '") + key + "'");
  }
  const auto v = j[key].get<long long>();
  if (v <= 0) throw InputError(std::string("field '") + key + "' must be > 0");
  return static_cast<Eigen::Index>(v);
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
    data.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("matrix: expected a JSON object");
  const auto rows = positive_size(j, "rows");
  const auto cols = positive_size(j, "cols");
  if (!j.contains("data") || !j["data"].is_array() ||
      static_cast<Eigen::Index>(j["data"].size()) != rows) {
    throw InputError("matrix: 'data' must hold exactly " + std::to_string(rows) +
                     " rows");
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j["data"][i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError("matrix: row " + std::to_string(i) + " must hold " +
                       std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = scalar_from_json(row[k]);
  }
  return m;
}

Json real_matrix_to_json(const RealMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    data.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json vector_to_json(const ComplexVector& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(scalar_to_json(v(i)));
  return Json{{"dim", v.size()}, {"data", std::move(data)}};
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("vector: expected a JSON object");
  const auto dim = positive_size(j, "dim");
  if (!j.contains("data") || !j["data"].is_array() ||
      static_cast<Eigen::Index>(j["data"].size()) != dim) {
    throw InputError("vector: 'data' must hold exactly " + std::to_string(dim) +
                     " entries");
  }
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = scalar_from_json(j["data"][i]);
  return v;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file_atomic(const std::filesystem::path& path, const Json& j) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace conecert
