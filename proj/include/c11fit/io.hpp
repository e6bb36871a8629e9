#pragma once

// JSON and CSV interchange for fields, solver reports and Wells complexes.

#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "c11fit/erm.hpp"
#include "c11fit/field.hpp"
#include "c11fit/wells.hpp"

namespace c11fit {

/// Malformed or inconsistent input data.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using json = nlohmann::json;

namespace detail {

inline json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// Columns of m as a list of lists.
inline json cols_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(vec_json(m.col(j)));
  return out;
}

inline Vec json_vec(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + ": expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

// Inverse of cols_json; `rows` is the expected column length.
inline Mat json_cols(const json& j, std::size_t rows, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of arrays");
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec v = json_vec(j[c], what);
    if (v.size() != static_cast<Eigen::Index>(rows)) throw InputError(std::string(what) + ": wrong inner length");
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

inline const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_double(std::string s, double& out) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  s = s.substr(b, e - b + 1);
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace detail

inline json to_json(const OneField& P) {
  return {{"dim", P.dim()},
          {"points", detail::cols_json(P.base().matrix())},
          {"values", detail::vec_json(P.values())},
          {"gradients", detail::cols_json(P.gradients())}};
}

inline OneField field_from_json(const json& j) {
  const json& dj = detail::member(j, "dim");
  if (!dj.is_number_integer() || dj.get<long long>() < 1) throw InputError("field: dim must be a positive integer");
  const auto d = dj.get<std::size_t>();
  Mat pts = detail::json_cols(detail::member(j, "points"), d, "field.points");
  Vec vals = detail::json_vec(detail::member(j, "values"), "field.values");
  Mat grads = detail::json_cols(detail::member(j, "gradients"), d, "field.gradients");
  try {
    return OneField(PointSet(std::move(pts)), std::move(vals), std::move(grads));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline json to_json(const SolveReport& r) {
  return {{"objective", r.objective},
          {"gamma1", r.gamma1_value},
          {"iterations", r.iterations},
          {"used_trivial_shortcut", r.used_trivial_shortcut},
          {"rho1", r.rho1},
          {"rho2", r.rho2},
          {"rho", r.rho},
          {"L", r.L},
          {"T", r.T},
          {"gamma_tol", r.gamma_tol},
          {"stalled", r.stalled},
          {"collapsed", r.collapsed},
          {"max_constraints", r.max_constraints},
          {"field", to_json(r.field)}};
}

/// Cells keep S, S_C, the orthonormal bases of S_H and S_E, and the S_* halfspaces.
/// The hull and barycentric data are rebuilt on load.
inline json to_json(const CellComplex& cx) {
  json cells = json::array();
  for (const WellsCell& c : cx.cells) {
    json hs = json::array();
    for (const Halfspace& h : c.sstar) hs.push_back({{"normal", detail::vec_json(h.normal)}, {"offset", h.offset}});
    cells.push_back({{"S", c.S},
                     {"SC", detail::vec_json(c.SC)},
                     {"U", detail::cols_json(c.U)},
                     {"V", detail::cols_json(c.V)},
                     {"d_at_SC", c.d_at_SC},
                     {"num_equalities", c.num_equalities},
                     {"halfspaces", hs}});
  }
  return {{"M", cx.config.M},
          {"perturbed", cx.config.perturbed},
          {"field", to_json(cx.config.field)},
          {"shifted", detail::cols_json(cx.config.shifted)},
          {"offsets", detail::vec_json(cx.config.offsets)},
          {"cells", cells}};
}

inline CellComplex complex_from_json(const json& j) {
  CellComplex cx;
  cx.config.field = field_from_json(detail::member(j, "field"));
  const std::size_t d = cx.config.field.dim();
  const std::size_t n = cx.config.field.size();
  cx.config.M = detail::member(j, "M").get<double>();
  if (!(cx.config.M > 0.0)) throw InputError("complex: M must be positive");
  cx.config.perturbed = detail::member(j, "perturbed").get<bool>();
  cx.config.shifted = detail::json_cols(detail::member(j, "shifted"), d, "complex.shifted");
  cx.config.offsets = detail::json_vec(detail::member(j, "offsets"), "complex.offsets");
  if (cx.config.shifted.cols() != static_cast<Eigen::Index>(n) || cx.config.offsets.size() != static_cast<Eigen::Index>(n))
    throw InputError("complex: shifted points and offsets must match the field size");
  for (const json& jc : detail::member(j, "cells")) {
    WellsCell c;
    c.S = detail::member(jc, "S").get<std::vector<std::size_t>>();
    if (c.S.empty() || c.S.size() > d + 1) throw InputError("complex: cell S has invalid size");
    for (std::size_t a : c.S)
      if (a >= n) throw InputError("complex: cell index out of range");
    c.SC = detail::json_vec(detail::member(jc, "SC"), "cell.SC");
    c.U = detail::json_cols(detail::member(jc, "U"), d, "cell.U");
    c.V = detail::json_cols(detail::member(jc, "V"), d, "cell.V");
    if (c.SC.size() != static_cast<Eigen::Index>(d)) throw InputError("complex: cell SC has wrong dimension");
    c.d_at_SC = detail::member(jc, "d_at_SC").get<double>();
    c.num_equalities = detail::member(jc, "num_equalities").get<std::size_t>();
    for (const json& h : detail::member(jc, "halfspaces")) {
      Halfspace hs{detail::json_vec(detail::member(h, "normal"), "halfspace.normal"), detail::member(h, "offset").get<double>()};
      if (hs.normal.size() != static_cast<Eigen::Index>(d)) throw InputError("complex: halfspace has wrong dimension");
      c.sstar.push_back(std::move(hs));
    }
    if (c.num_equalities > c.sstar.size()) throw InputError("complex: num_equalities exceeds halfspace count");
    c.hull.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c.S.size()));
    for (std::size_t q = 0; q < c.S.size(); ++q)
      c.hull.col(static_cast<Eigen::Index>(q)) = cx.config.shifted.col(static_cast<Eigen::Index>(c.S[q]));
    detail::prepare_barycentric(c);
    cx.cells.push_back(std::move(c));
  }
  if (cx.cells.empty()) throw InputError("complex: no cells");
  return cx;
}

/// Numeric CSV table. A first line that does not parse as numbers is taken as a header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = detail::parse_double(cells[i], row[i]);
    if (!numeric) {
      if (t.header.empty() && t.rows.empty()) {
        t.header = cells;
        continue;
      }
      throw InputError("csv line " + std::to_string(lineno) + ": non-numeric entry");
    }
    const std::size_t width = t.rows.empty() ? (t.header.empty() ? row.size() : t.header.size()) : t.rows.front().size();
    if (row.size() != width) throw InputError("csv line " + std::to_string(lineno) + ": wrong number of columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Regression data: columns x_1..x_d, y.
inline std::pair<PointSet, Vec> read_problem_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  if (t.rows.empty()) throw InputError("csv: no data rows");
  const std::size_t cols = t.rows.front().size();
  if (cols < 2) throw InputError("csv: need at least one coordinate column and a y column");
  Mat pts(static_cast<Eigen::Index>(cols - 1), static_cast<Eigen::Index>(t.rows.size()));
  Vec y(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    for (std::size_t i = 0; i + 1 < cols; ++i) pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[j][i];
    y(static_cast<Eigen::Index>(j)) = t.rows[j][cols - 1];
  }
  if (!y.allFinite()) throw InputError("csv: non-finite y");
  try {
    return {PointSet(std::move(pts)), std::move(y)};
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

/// Query points, one per row; every column is a coordinate. Returns d x m.
inline Mat read_points_csv(std::istream& in, std::size_t d) {
  const CsvTable t = read_csv(in);
  Mat q(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    if (t.rows[j].size() != d) throw InputError("query csv: expected " + std::to_string(d) + " columns");
    for (std::size_t i = 0; i < d; ++i) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[j][i];
  }
  if (!q.allFinite()) throw InputError("query csv: non-finite coordinate");
  return q;
}

/// Writes x1..xd,value,g1..gd for each query column.
inline void write_eval_csv(std::ostream& os, const CellComplex& cx, const Mat& queries) {
  const auto d = queries.rows();
  os.precision(17);
  for (Eigen::Index i = 0; i < d; ++i) os << 'x' << i + 1 << ',';
  os << "value";
  for (Eigen::Index i = 0; i < d; ++i) os << ",g" << i + 1;
  os << '\n';
  for (Eigen::Index j = 0; j < queries.cols(); ++j) {
    const EvalResult r = eval(cx, queries.col(j));
    for (Eigen::Index i = 0; i < d; ++i) os << queries(i, j) << ',';
    os << r.value;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << r.gradient(i);
    os << '\n';
  }
}

}  // namespace c11fit
