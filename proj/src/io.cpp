#include "qcdj/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qcdj/linalg.hpp"

namespace qcdj {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f.good())
    throw std::invalid_argument("cannot open file: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

// Complex matrices travel as row-major arrays of [re, im] pairs.
Mat json_to_mat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(where + ": expected a non-empty matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(where + ": ragged matrix rows");
    for (int k = 0; k < cols; ++k) {
      const json& cell = row.at(k);
      if (!cell.is_array() || cell.size() != 2 ||
          !cell.at(0).is_number() || !cell.at(1).is_number())
        throw std::invalid_argument(where +
                                    ": entries must be [re, im] pairs");
      m(i, k) = cx(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return m;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k)
      row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

int require_dim(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw std::invalid_argument(where + ": missing integer field " + key);
  const int v = j.at(key).get<int>();
  if (v < 1) throw std::invalid_argument(where + ": dimensions must be >= 1");
  return v;
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f.good())
    throw std::invalid_argument("cannot write file: " + path);
  f << j.dump(2) << '\n';
}

}  // namespace

Mat parse_state_file(const std::string& path) {
  const json j = load_json(path);
  const int dim = require_dim(j, "dim", path);
  if (!j.contains("matrix"))
    throw std::invalid_argument(path + ": missing matrix field");
  const Mat m = json_to_mat(j.at("matrix"), path);
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument(path + ": matrix does not match dim");
  if ((m - m.dagger()).norm_fro() > 1e-8)
    throw std::invalid_argument(path + ": state is not Hermitian");
  const HermitianEig e = hermitian_eig(m.hermitized());
  if (e.values.back() < -1e-8)
    throw std::invalid_argument(path + ": state is not positive semidefinite");
  if (std::abs(m.trace().real() - 1.0) > 1e-6)
    throw std::invalid_argument(path + ": state trace differs from 1");
  return m.hermitized();
}

void write_state_file(const std::string& path, const Mat& rho) {
  json j;
  j["dim"] = rho.rows();
  j["matrix"] = mat_to_json(rho);
  dump_json(path, j);
}

Channel parse_channel_file(const std::string& path) {
  const json j = load_json(path);
  if (!j.contains("dims"))
    throw std::invalid_argument(path + ": missing dims field");
  const json& dims = j.at("dims");
  const int da = require_dim(dims, "A", path);
  const int de = require_dim(dims, "E", path);
  const int db = require_dim(dims, "B", path);
  if (!j.contains("trace_preserving") || !j.at("trace_preserving").is_boolean())
    throw std::invalid_argument(path + ": missing boolean trace_preserving");
  const bool tp = j.at("trace_preserving").get<bool>();

  const bool has_kraus = j.contains("kraus");
  const bool has_choi = j.contains("choi");
  if (has_kraus == has_choi)
    throw std::invalid_argument(path +
                                ": exactly one of kraus or choi is required");
  try {
    if (has_kraus) {
      const json& list = j.at("kraus");
      if (!list.is_array() || list.empty())
        throw std::invalid_argument(path + ": kraus must be a non-empty list");
      std::vector<Mat> kraus;
      kraus.reserve(list.size());
      for (const json& k : list) kraus.push_back(json_to_mat(k, path));
      return Channel(da, de, db, std::move(kraus), tp);
    }
    return Channel::from_choi(da, de, db, json_to_mat(j.at("choi"), path), tp);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_channel_file(const std::string& path, const Channel& c) {
  json j;
  j["dims"] = {{"A", c.dim_a()}, {"E", c.dim_e()}, {"B", c.dim_b()}};
  j["trace_preserving"] = c.trace_preserving();
  json list = json::array();
  for (const Mat& k : c.kraus()) list.push_back(mat_to_json(k));
  j["kraus"] = std::move(list);
  dump_json(path, j);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

}  // namespace qcdj
