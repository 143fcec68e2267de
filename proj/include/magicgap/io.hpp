#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <string>

#include "codes.hpp"
#include "estimate.hpp"

namespace magicgap {

using nlohmann::json;

// File-level problems (missing, unreadable, malformed JSON); domain-invariant
// violations keep throwing std::invalid_argument / std::domain_error.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json complex_to_json(const cx& z) { return json::array({z.real(), z.imag()}); }

inline cx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw IoError("complex entries must be [re, im] pairs");
  return cx(j[0].get<double>(), j[1].get<double>());
}

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (long long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long long c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_json(const json& j, long long rows, long long cols) {
  if (!j.is_array() || (long long)j.size() != rows) throw IoError("matrix row count mismatch");
  Mat m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || (long long)j[r].size() != cols)
      throw IoError("matrix column count mismatch");
    for (long long c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline std::pair<int, int> dims_from_json(const json& j) {
  if (!j.contains("d") || !j.contains("n") || !j["d"].is_number_integer() ||
      !j["n"].is_number_integer())
    throw IoError("missing integer fields \"d\" and \"n\"");
  return {j["d"].get<int>(), j["n"].get<int>()};
}

// {"d", "n", "matrix"}; all projector invariants re-validated on load.
inline SubspaceProjector load_projector(const std::string& path) {
  json j = read_json_file(path);
  auto [d, n] = dims_from_json(j);
  HilbertSpec spec(d, n);
  if (!j.contains("matrix")) throw IoError("missing field \"matrix\"");
  return SubspaceProjector(spec, matrix_from_json(j["matrix"], spec.dim(), spec.dim()));
}

// {"d", "n", "d_small", "columns"}.
inline Embedding load_embedding(const std::string& path) {
  json j = read_json_file(path);
  auto [d, n] = dims_from_json(j);
  HilbertSpec spec(d, n);
  if (!j.contains("d_small") || !j["d_small"].is_number_integer())
    throw IoError("missing integer field \"d_small\"");
  int ds = j["d_small"].get<int>();
  if (!j.contains("columns")) throw IoError("missing field \"columns\"");
  return Embedding(spec, matrix_from_json(j["columns"], spec.dim(), ds));
}

// {"d", "n", "generators", "homomorphism": optional {"<flat index>": value}}.
inline BuiltinCode load_isotropic(const std::string& path) {
  json j = read_json_file(path);
  auto [d, n] = dims_from_json(j);
  HilbertSpec spec(d, n);
  if (!j.contains("generators") || !j["generators"].is_array())
    throw IoError("missing array field \"generators\"");
  std::vector<SymplecticIndex> gens;
  for (const auto& g : j["generators"]) {
    if (!g.is_array()) throw IoError("generators must be arrays of integers");
    SymplecticIndex a;
    for (const auto& v : g) {
      if (!v.is_number_integer()) throw IoError("generator components must be integers");
      a.push_back(v.get<int>());
    }
    gens.push_back(std::move(a));
  }
  BuiltinCode code{isotropic_from_generators(spec, gens), {}};
  if (j.contains("homomorphism")) {
    if (!j["homomorphism"].is_object()) throw IoError("\"homomorphism\" must be an object");
    for (const auto& [key, val] : j["homomorphism"].items()) {
      if (!val.is_number_integer()) throw IoError("homomorphism values must be integers");
      long long flat = 0;
      try {
        flat = std::stoll(key);
      } catch (const std::exception&) {
        throw IoError("homomorphism keys must be flat indices");
      }
      if (!code.set.contains_flat(flat))
        throw std::invalid_argument("homomorphism key not in the isotropic set");
      code.f.values[flat] = val.get<int>();
    }
  }
  return code;
}

inline json mc_result_to_json(const McResult& r) {
  return {{"mean", r.mean}, {"stderr", r.stderr_}, {"samples", r.samples}, {"seed", r.seed}};
}

// 12 significant digits.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Smallest-denominator fraction p/q (q <= 10000) within 1e-9, if any.
inline std::string fraction_annotation(double v) {
  if (!std::isfinite(v) || std::abs(v) > 1e6) return "";
  for (long long q = 1; q <= 10000; ++q) {
    double pd = std::round(v * double(q));
    if (std::abs(v * double(q) - pd) < 1e-9 * double(q)) {
      long long p = (long long)pd;
      long long g = std::gcd(std::abs(p), q);
      if (g == 0) g = 1;
      return std::to_string(p / g) + "/" + std::to_string(q / g);
    }
  }
  return "";
}

// Value plus exact-fraction annotation where one exists.
inline json annotated(double v) {
  json j = {{"value", v}, {"display", format_number(v)}};
  std::string frac = fraction_annotation(v);
  if (!frac.empty()) j["fraction"] = frac;
  return j;
}

}  // namespace magicgap
