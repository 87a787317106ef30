#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/designs.hpp"
#include "ndlhs/oa.hpp"
#include "ndlhs/rng.hpp"

namespace ndlhs {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline long long parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ": expected an integer, got '" + trim(s) + "'");
  }
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ": expected a number, got '" + trim(s) + "'");
  }
}

// key=value tokens from a "# key=value key=value" header line
inline void parse_header_tokens(const std::string& line,
                                std::map<std::string, std::string>& kv) {
  std::istringstream in(line.substr(1));
  std::string tok;
  while (in >> tok) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos) continue;
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// orthogonal array CSV: integer rows, '#' comment lines allowed

inline void write_oa_csv(const OrthogonalArray& oa, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "# OA(" << oa.rows << ", " << oa.cols << ", " << oa.levels << ", "
      << oa.strength << "), index " << oa.index << "\n";
  for (int i = 0; i < oa.rows; ++i) {
    for (int j = 0; j < oa.cols; ++j) out << (j ? "," : "") << oa.at(i, j);
    out << "\n";
  }
  if (!out) throw io_error("write failed for " + path);
}

// Levels are inferred from the largest entry; the index is derived from the
// declared strength when the row count divides evenly (0 otherwise, which
// verify_strength reports as a failure).
inline OrthogonalArray read_oa_csv(const std::string& path, int declared_strength = 2) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::vector<int>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<int> row;
    for (const std::string& f : detail::split(t, ','))
      row.push_back(static_cast<int>(
          detail::parse_int(f, path + ":" + std::to_string(lineno))));
    if (!rows.empty() && row.size() != rows.front().size())
      throw io_error(path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path + ": no data rows");
  int levels = 0;
  for (const auto& r : rows)
    for (int v : r) {
      if (v < 1) throw io_error(path + ": entries must be positive integers");
      levels = std::max(levels, v);
    }
  const int N = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows.front().size());
  if (declared_strength < 1 || declared_strength > m)
    throw std::invalid_argument("read_oa_csv: declared strength must be in 1.." +
                                std::to_string(m));
  long long cells = 1;
  for (int i = 0; i < declared_strength; ++i) cells *= levels;
  OrthogonalArray oa(N, m, levels, declared_strength,
                     N % cells == 0 ? static_cast<int>(N / cells) : 0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < m; ++j) oa.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return oa;
}

// ---------------------------------------------------------------------------
// design CSV: one provenance header line, then "slice,v1,...,vm" rows

inline void write_design_csv(const DesignFamily& family, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "# scheme=" << scheme_name(family.scheme) << " n=" << family.n()
      << " m=" << family.m() << " t=" << family.t()
      << " seed=" << family.provenance.master_seed;
  if (!family.provenance.stream_path.empty()) {
    out << " path=";
    for (std::size_t i = 0; i < family.provenance.stream_path.size(); ++i)
      out << (i ? "." : "") << family.provenance.stream_path[i];
  }
  out << " rng=" << rng_id;
  if (!family.oa_tag.empty()) out << " oa=" << family.oa_tag;
  if (family.base_batches > 0) out << " base_t=" << family.base_batches;
  out << "\n";
  for (int r = 0; r < family.t(); ++r) {
    const DesignMatrix& d = family.slices[static_cast<std::size_t>(r)];
    for (int i = 0; i < d.rows; ++i) {
      out << (r + 1);
      for (int k = 0; k < d.cols; ++k) out << "," << detail::format_value(d.at(i, k));
      out << "\n";
    }
  }
  if (!out) throw io_error("write failed for " + path);
}

inline DesignFamily read_design_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      detail::parse_header_tokens(t, kv);
      continue;
    }
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> fields = detail::split(t, ',');
    if (fields.size() < 2) throw io_error(where + ": expected slice,values");
    int slice = static_cast<int>(detail::parse_int(fields[0], where));
    std::vector<double> vals;
    vals.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f)
      vals.push_back(detail::parse_double(fields[f], where));
    if (!rows.empty() && vals.size() != rows.front().second.size())
      throw io_error(where + ": ragged row");
    rows.emplace_back(slice, std::move(vals));
  }
  for (const char* key : {"scheme", "n", "m", "t", "seed"})
    if (!kv.count(key))
      throw io_error(path + ": missing '" + std::string(key) + "' in header");

  DesignFamily family;
  try {
    family.scheme = scheme_from_name(kv["scheme"]);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
  const int n = static_cast<int>(detail::parse_int(kv["n"], path + " header n"));
  const int m = static_cast<int>(detail::parse_int(kv["m"], path + " header m"));
  const int t = static_cast<int>(detail::parse_int(kv["t"], path + " header t"));
  if (n < 1 || m < 1 || t < 1) throw io_error(path + ": header dimensions must be positive");
  family.provenance.master_seed = static_cast<std::uint64_t>(
      detail::parse_int(kv["seed"], path + " header seed"));
  if (kv.count("path"))
    for (const std::string& part : detail::split(kv["path"], '.'))
      family.provenance.stream_path.push_back(static_cast<std::uint32_t>(
          detail::parse_int(part, path + " header path")));
  if (kv.count("oa")) family.oa_tag = kv["oa"];
  if (kv.count("base_t"))
    family.base_batches = static_cast<int>(
        detail::parse_int(kv["base_t"], path + " header base_t"));
  if (kv.count("rng") && kv["rng"] != rng_id)
    throw io_error(path + ": generated with rng '" + kv["rng"] + "', this build uses '" +
                   rng_id + "'");

  if (static_cast<int>(rows.size()) != n * t)
    throw io_error(path + ": expected " + std::to_string(n * t) + " data rows, found " +
                   std::to_string(rows.size()));
  int resolution = n;
  if (family.scheme == Scheme::slh || family.scheme == Scheme::solh)
    resolution = n * t;
  if (family.base_batches > 0) resolution = n * family.base_batches;
  family.slices.assign(static_cast<std::size_t>(t), DesignMatrix(n, m, resolution));
  std::vector<int> fill(static_cast<std::size_t>(t), 0);
  for (const auto& [slice, vals] : rows) {
    if (static_cast<int>(vals.size()) != m)
      throw io_error(path + ": row width disagrees with header m=" + std::to_string(m));
    if (slice < 1 || slice > t)
      throw io_error(path + ": slice index " + std::to_string(slice) + " outside 1.." +
                     std::to_string(t));
    int& i = fill[static_cast<std::size_t>(slice - 1)];
    if (i >= n) throw io_error(path + ": more than n=" + std::to_string(n) +
                               " rows for slice " + std::to_string(slice));
    DesignMatrix& d = family.slices[static_cast<std::size_t>(slice - 1)];
    for (int k = 0; k < m; ++k) d.at(i, k) = vals[static_cast<std::size_t>(k)];
    ++i;
  }
  for (int c : fill)
    if (c != n) throw io_error(path + ": incomplete slice");
  return family;
}

}  // namespace ndlhs
