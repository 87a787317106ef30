#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/galois.hpp"

namespace ndlhs {

struct column_limit_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// N x m array over levels 1..s together with its declared strength and index.
struct OrthogonalArray {
  int rows = 0, cols = 0, levels = 0;
  int strength = 0, index = 0;
  std::vector<int> c;

  OrthogonalArray() = default;
  OrthogonalArray(int rows_, int cols_, int levels_, int strength_, int index_)
      : rows(rows_), cols(cols_), levels(levels_), strength(strength_), index(index_),
        c(static_cast<std::size_t>(rows_) * cols_, 0) {}

  int& at(int i, int j) { return c[static_cast<std::size_t>(i) * cols + j]; }
  int at(int i, int j) const { return c[static_cast<std::size_t>(i) * cols + j]; }
};

namespace detail {

inline void check_levels(const OrthogonalArray& oa) {
  for (int v : oa.c)
    if (v < 1 || v > oa.levels)
      throw std::invalid_argument("orthogonal array entry " + std::to_string(v) +
                                  " outside 1.." + std::to_string(oa.levels));
}

template <typename Fn>
void for_each_combination(int m, int tau, Fn&& fn) {
  std::vector<int> cols(static_cast<std::size_t>(tau));
  for (int i = 0; i < tau; ++i) cols[static_cast<std::size_t>(i)] = i;
  for (;;) {
    fn(cols);
    int i = tau - 1;
    while (i >= 0 && cols[static_cast<std::size_t>(i)] == m - tau + i) --i;
    if (i < 0) return;
    ++cols[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < tau; ++j)
      cols[static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

struct StrengthCheck {
  bool pass = false;
  int lambda = 0;
  // witness on failure: the column subset (1-based) and level tuple whose
  // count deviated from the expectation
  std::vector<int> columns;
  std::vector<int> tuple;
  int count = 0;
  int expected = 0;
};

// Every tau-column projection must contain each level tuple exactly N/s^tau times.
inline StrengthCheck verify_strength(const OrthogonalArray& oa, int tau) {
  if (tau < 1 || tau > oa.cols)
    throw std::invalid_argument("verify_strength: tau must be in 1.." +
                                std::to_string(oa.cols));
  detail::check_levels(oa);
  long long cells = 1;
  for (int i = 0; i < tau; ++i) cells *= oa.levels;
  StrengthCheck out;
  if (oa.rows % cells != 0) return out;  // lambda would not be an integer
  const int lambda = static_cast<int>(oa.rows / cells);
  bool ok = true;
  std::vector<int> counts(static_cast<std::size_t>(cells));
  detail::for_each_combination(oa.cols, tau, [&](const std::vector<int>& cols) {
    if (!ok) return;
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < oa.rows; ++i) {
      long long key = 0;
      for (int c : cols) key = key * oa.levels + (oa.at(i, c) - 1);
      counts[static_cast<std::size_t>(key)]++;
    }
    for (long long key = 0; key < cells; ++key) {
      if (counts[static_cast<std::size_t>(key)] != lambda) {
        ok = false;
        out.columns.clear();
        for (int c : cols) out.columns.push_back(c + 1);
        out.tuple.assign(static_cast<std::size_t>(tau), 0);
        long long rem = key;
        for (int p = tau - 1; p >= 0; --p) {
          out.tuple[static_cast<std::size_t>(p)] = static_cast<int>(rem % oa.levels) + 1;
          rem /= oa.levels;
        }
        out.count = counts[static_cast<std::size_t>(key)];
        out.expected = lambda;
        return;
      }
    }
  });
  out.pass = ok;
  out.lambda = ok ? lambda : 0;
  return out;
}

struct DefectWitness {
  int row_a = 0, row_b = 0;       // 1-based, row_a < row_b
  std::vector<int> columns;       // all columns (1-based) where the rows agree
};

// Row pairs agreeing in more than the declared strength worth of columns.
// Empty result means the array is defect-free.
inline std::vector<DefectWitness> coincidence_defect(const OrthogonalArray& oa) {
  detail::check_levels(oa);
  std::vector<DefectWitness> out;
  std::vector<int> agree;
  for (int i = 0; i < oa.rows; ++i)
    for (int j = i + 1; j < oa.rows; ++j) {
      agree.clear();
      for (int c = 0; c < oa.cols; ++c)
        if (oa.at(i, c) == oa.at(j, c)) agree.push_back(c + 1);
      if (static_cast<int>(agree.size()) >= oa.strength + 1)
        out.push_back({i + 1, j + 1, agree});
    }
  return out;
}

// Ordered row pairs (i,j), i=j included, agreeing on exactly r of the columns in u.
inline long long m_count(const OrthogonalArray& oa, const std::vector<int>& u, int r) {
  if (r < 0 || r > static_cast<int>(u.size()))
    throw std::invalid_argument("m_count: r must be in 0..|u|");
  std::vector<char> used(static_cast<std::size_t>(oa.cols), 0);
  for (int c : u) {
    if (c < 1 || c > oa.cols)
      throw std::invalid_argument("m_count: column " + std::to_string(c) +
                                  " outside 1.." + std::to_string(oa.cols));
    if (used[static_cast<std::size_t>(c - 1)])
      throw std::invalid_argument("m_count: duplicate column in u");
    used[static_cast<std::size_t>(c - 1)] = 1;
  }
  long long total = 0;
  for (int i = 0; i < oa.rows; ++i)
    for (int j = 0; j < oa.rows; ++j) {
      int agree = 0;
      for (int c : u) agree += oa.at(i, c - 1) == oa.at(j, c - 1);
      total += agree == r;
    }
  return total;
}

// Group rows by their level in the given column and drop that column. Each of
// the s groups keeps strength tau-1 at the same index.
inline std::vector<OrthogonalArray> slice_by_column(const OrthogonalArray& oa, int col) {
  if (col < 1 || col > oa.cols)
    throw std::invalid_argument("slice_by_column: column outside 1.." +
                                std::to_string(oa.cols));
  if (oa.strength < 2)
    throw std::invalid_argument("slice_by_column: declared strength must be at least 2");
  detail::check_levels(oa);
  if (oa.rows % oa.levels != 0)
    throw std::invalid_argument("slice_by_column: rows not divisible by level count");
  const int per = oa.rows / oa.levels;
  std::vector<OrthogonalArray> out;
  out.reserve(static_cast<std::size_t>(oa.levels));
  for (int level = 1; level <= oa.levels; ++level)
    out.emplace_back(per, oa.cols - 1, oa.levels, oa.strength - 1, oa.index);
  std::vector<int> fill(static_cast<std::size_t>(oa.levels), 0);
  for (int i = 0; i < oa.rows; ++i) {
    const int level = oa.at(i, col - 1);
    int& row = fill[static_cast<std::size_t>(level - 1)];
    if (row >= per)
      throw std::invalid_argument("slice_by_column: column levels are not balanced");
    OrthogonalArray& slice = out[static_cast<std::size_t>(level - 1)];
    int jj = 0;
    for (int j = 0; j < oa.cols; ++j) {
      if (j == col - 1) continue;
      slice.at(row, jj++) = oa.at(i, j);
    }
    ++row;
  }
  for (int c : fill)
    if (c != per)
      throw std::invalid_argument("slice_by_column: column levels are not balanced");
  return out;
}

// OA(s^2, m, s, 2) with index 1 over GF(s): rows (alpha, beta), product
// columns alpha*e_j + beta for the first m field elements, plus the symbol
// column alpha when m = s+1.
inline OrthogonalArray bush(int s, int m) {
  if (m < 1) throw std::invalid_argument("bush: m must be positive");
  if (m > s + 1)
    throw column_limit_error("bush: m = " + std::to_string(m) +
                             " exceeds the construction limit s+1 = " +
                             std::to_string(s + 1));
  GaloisField f(s);
  OrthogonalArray oa(s * s, m, s, 2, 1);
  const int prod_cols = std::min(m, s);
  for (int alpha = 0; alpha < s; ++alpha)
    for (int beta = 0; beta < s; ++beta) {
      const int row = alpha * s + beta;
      for (int j = 0; j < prod_cols; ++j)
        oa.at(row, j) = f.add(f.mul(alpha, j), beta) + 1;
      if (m == s + 1) oa.at(row, m - 1) = alpha + 1;
    }
  return oa;
}

// OA(lambda*s^2, m, s, 2) with index lambda over GF(q), q = lambda*s: rows
// (i, k) for i in GF(q), k in GF(s); product columns trunc(i*j) + k for the
// first m field elements of GF(q), plus the symbol column trunc(i) when
// m = q+1. Truncation keeps the low digits, which is additive in fixed
// characteristic, so every column pair stays balanced at index lambda.
inline OrthogonalArray bose_bush(int lam, int s, int m) {
  if (lam < 1) throw std::invalid_argument("bose_bush: lambda must be positive");
  if (m < 1) throw std::invalid_argument("bose_bush: m must be positive");
  const int q = lam * s;
  if (m > q + 1)
    throw column_limit_error("bose_bush: m = " + std::to_string(m) +
                             " exceeds the construction limit lambda*s+1 = " +
                             std::to_string(q + 1));
  GaloisField fs(s);
  std::optional<GaloisField> fq_store;
  try {
    fq_store.emplace(q);
  } catch (const std::invalid_argument&) {
    throw unsupported_order_error(
        "bose_bush: lambda = " + std::to_string(lam) + " and s = " + std::to_string(s) +
        " need lambda*s = " + std::to_string(q) + " to be a supported prime power");
  }
  const GaloisField& fq = *fq_store;
  OrthogonalArray oa(q * s, m, s, 2, lam);
  const int prod_cols = std::min(m, q);
  for (int i = 0; i < q; ++i)
    for (int k = 0; k < s; ++k) {
      const int row = i * s + k;
      for (int j = 0; j < prod_cols; ++j)
        oa.at(row, j) = fs.add(fq.mul(i, j) % s, k) + 1;
      if (m == q + 1) oa.at(row, m - 1) = i % s + 1;
    }
  return oa;
}

// Base-array request in the tag syntax used on the command line and in file
// headers: "bush:s=4" or "bosebush:lam=2,s=8".
struct OaSpec {
  enum class Family { bush, bose_bush };
  Family family = Family::bush;
  int lam = 1;
  int s = 0;
};

inline OaSpec parse_oa_tag(const std::string& tag) {
  const std::size_t colon = tag.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("base array tag needs parameters: '" + tag + "'");
  const std::string family = tag.substr(0, colon);
  OaSpec spec;
  if (family == "bush") spec.family = OaSpec::Family::bush;
  else if (family == "bosebush") spec.family = OaSpec::Family::bose_bush;
  else throw std::invalid_argument("unknown base array family '" + family + "'");
  std::string params = tag.substr(colon + 1);
  std::size_t start = 0;
  bool have_s = false;
  while (start <= params.size()) {
    std::size_t comma = params.find(',', start);
    if (comma == std::string::npos) comma = params.size();
    const std::string field = params.substr(start, comma - start);
    const std::size_t eq = field.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("base array tag field '" + field + "' is not key=value");
    const std::string key = field.substr(0, eq);
    int value = 0;
    try {
      std::size_t pos = 0;
      value = std::stoi(field.substr(eq + 1), &pos);
      if (pos != field.size() - eq - 1) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw std::invalid_argument("base array tag field '" + field + "' has a bad value");
    }
    if (value < 1)
      throw std::invalid_argument("base array tag field '" + field + "' must be positive");
    if (key == "s") {
      spec.s = value;
      have_s = true;
    } else if (key == "lam" && spec.family == OaSpec::Family::bose_bush) {
      spec.lam = value;
    } else {
      throw std::invalid_argument("unknown base array tag key '" + key + "'");
    }
    start = comma + 1;
  }
  if (!have_s) throw std::invalid_argument("base array tag '" + tag + "' is missing s=");
  return spec;
}

inline std::string oa_tag(const OaSpec& spec) {
  if (spec.family == OaSpec::Family::bush) return "bush:s=" + std::to_string(spec.s);
  return "bosebush:lam=" + std::to_string(spec.lam) + ",s=" + std::to_string(spec.s);
}

inline OrthogonalArray build_oa(const OaSpec& spec, int cols) {
  if (spec.family == OaSpec::Family::bush) return bush(spec.s, cols);
  return bose_bush(spec.lam, spec.s, cols);
}

}  // namespace ndlhs
