#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/rng.hpp"
#include "ndlhs/tolerances.hpp"

namespace ndlhs {

enum class Scheme { mc, ilh, slh, solh, spolh, indbb };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::mc: return "mc";
    case Scheme::ilh: return "ilh";
    case Scheme::slh: return "slh";
    case Scheme::solh: return "solh";
    case Scheme::spolh: return "spolh";
    case Scheme::indbb: return "indbb";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::mc, Scheme::ilh, Scheme::slh, Scheme::solh,
                   Scheme::spolh, Scheme::indbb})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme tag: " + name);
}

// Integer array whose columns, for a proper Latin hypercube, are permutations
// of {1..n}. decompose() also returns this shape for arbitrary designs, where
// the permutation property need not hold; is_latin() checks it.
struct LatinHypercube {
  int n = 0, m = 0;
  std::vector<int> a;

  LatinHypercube() = default;
  LatinHypercube(int n_, int m_) : n(n_), m(m_), a(static_cast<std::size_t>(n_) * m_, 0) {}

  int& at(int i, int k) { return a[static_cast<std::size_t>(i) * m + k]; }
  int at(int i, int k) const { return a[static_cast<std::size_t>(i) * m + k]; }
};

inline bool is_latin(const LatinHypercube& lh) {
  std::vector<char> seen(static_cast<std::size_t>(lh.n));
  for (int k = 0; k < lh.m; ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int i = 0; i < lh.n; ++i) {
      const int v = lh.at(i, k);
      if (v < 1 || v > lh.n || seen[static_cast<std::size_t>(v - 1)]) return false;
      seen[static_cast<std::size_t>(v - 1)] = 1;
    }
  }
  return true;
}

// Real scenario matrix with entries in (0,1]. resolution is the stratification
// granularity: n for a standalone LH design, n*t for slices of a sliced family.
struct DesignMatrix {
  int rows = 0, cols = 0;
  int resolution = 0;
  std::vector<double> xi;

  DesignMatrix() = default;
  DesignMatrix(int rows_, int cols_, int resolution_)
      : rows(rows_), cols(cols_), resolution(resolution_),
        xi(static_cast<std::size_t>(rows_) * cols_, 0.0) {}

  double& at(int i, int k) { return xi[static_cast<std::size_t>(i) * cols + k]; }
  double at(int i, int k) const { return xi[static_cast<std::size_t>(i) * cols + k]; }
};

struct DesignFamily {
  Scheme scheme = Scheme::mc;
  std::vector<DesignMatrix> slices;
  SeedSpec provenance;
  std::string oa_tag;        // base array description for OA-built schemes
  int base_batches = 0;      // full family size behind a truncated family

  int t() const { return static_cast<int>(slices.size()); }
  int n() const { return slices.empty() ? 0 : slices.front().rows; }
  int m() const { return slices.empty() ? 0 : slices.front().cols; }

  DesignMatrix stacked() const {
    DesignMatrix out(n() * t(), m(), n() * t());
    int row = 0;
    for (const auto& s : slices)
      for (int i = 0; i < s.rows; ++i, ++row)
        for (int k = 0; k < s.cols; ++k) out.at(row, k) = s.at(i, k);
    return out;
  }
};

// Stratum index of x at granularity g: intervals ((i-1)/g, i/g], i = 1..g.
// Values within the guard of a boundary go to the lower interval.
inline int level_index(double x, int g) {
  const double y = static_cast<double>(g) * x;
  const double r = std::nearbyint(y);
  int level;
  if (std::abs(y - r) <= tol::boundary_guard && r >= 1.0)
    level = static_cast<int>(r);
  else
    level = static_cast<int>(std::ceil(y));
  if (level < 1) level = 1;
  if (level > g) level = g;
  return level;
}

struct LatinCheck {
  bool pass = true;
  int column = 0;  // 1-based witness when failed
  int level = 0;   // duplicated level
};

inline LatinCheck validate_latin(const DesignMatrix& d, int g) {
  if (d.rows != g)
    throw std::invalid_argument("validate_latin: design has " + std::to_string(d.rows) +
                                " rows, expected " + std::to_string(g));
  std::vector<char> seen(static_cast<std::size_t>(g));
  for (int k = 0; k < d.cols; ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int i = 0; i < d.rows; ++i) {
      const int level = level_index(d.at(i, k), g);
      if (seen[static_cast<std::size_t>(level - 1)]) return {false, k + 1, level};
      seen[static_cast<std::size_t>(level - 1)] = 1;
    }
  }
  return {};
}

struct SlicedCheck {
  bool slices_pass = true;   // every slice is an LH at resolution n
  bool stacked_pass = true;  // the stack is an LH at resolution n*t
  int failed_slice = 0;      // 1-based
  LatinCheck slice_detail;
  LatinCheck stacked_detail;

  bool pass() const { return slices_pass && stacked_pass; }
};

inline SlicedCheck validate_sliced(const DesignFamily& family) {
  if (family.slices.empty())
    throw std::invalid_argument("validate_sliced: family is empty");
  const int n = family.n(), m = family.m();
  for (const auto& s : family.slices)
    if (s.rows != n || s.cols != m)
      throw std::invalid_argument("validate_sliced: slices have unequal shapes");
  SlicedCheck out;
  for (int r = 0; r < family.t(); ++r) {
    const LatinCheck c = validate_latin(family.slices[static_cast<std::size_t>(r)], n);
    if (!c.pass) {
      out.slices_pass = false;
      out.failed_slice = r + 1;
      out.slice_detail = c;
      break;
    }
  }
  const LatinCheck c = validate_latin(family.stacked(), n * family.t());
  if (!c.pass) {
    out.stacked_pass = false;
    out.stacked_detail = c;
  }
  return out;
}

struct Decomposition {
  LatinHypercube b;
  std::vector<double> theta;  // row-major, same shape as the design

  double theta_at(int i, int k) const { return theta[static_cast<std::size_t>(i) * b.m + k]; }
};

inline Decomposition decompose(const DesignMatrix& d, int n) {
  if (n < 1) throw std::invalid_argument("decompose: n must be positive");
  Decomposition out;
  out.b = LatinHypercube(d.rows, d.cols);
  out.theta.resize(static_cast<std::size_t>(d.rows) * d.cols);
  for (int i = 0; i < d.rows; ++i)
    for (int k = 0; k < d.cols; ++k) {
      const double x = d.at(i, k);
      if (!(x > 0.0) || x > 1.0)
        throw std::domain_error("decompose: entry " + std::to_string(x) +
                                " outside (0,1]");
      const int b = static_cast<int>(std::ceil(static_cast<double>(n) * x));
      out.b.at(i, k) = b;
      out.theta[static_cast<std::size_t>(i) * d.cols + k] =
          static_cast<double>(b) - static_cast<double>(n) * x;
    }
  return out;
}

inline void check_dims(int n, int m, int t) {
  if (n < 1 || m < 1 || t < 1)
    throw std::invalid_argument("design dimensions must be positive (n=" +
                                std::to_string(n) + " m=" + std::to_string(m) +
                                " t=" + std::to_string(t) + ")");
}

inline DesignFamily gen_monte_carlo(int n, int m, int t, const SeedSpec& seed) {
  check_dims(n, m, t);
  DesignFamily family;
  family.scheme = Scheme::mc;
  family.provenance = seed;
  for (int r = 0; r < t; ++r) {
    Stream s = seed.child(static_cast<std::uint32_t>(r)).open();
    DesignMatrix d(n, m, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < m; ++k) d.at(i, k) = 1.0 - s.next_unit();
    family.slices.push_back(std::move(d));
  }
  return family;
}

inline DesignMatrix gen_ordinary_lh(int n, int m, const SeedSpec& seed) {
  check_dims(n, m, 1);
  Stream s = seed.open();
  DesignMatrix d(n, m, n);
  LatinHypercube a(n, m);
  for (int k = 0; k < m; ++k) {
    const auto perm = uniform_permutation(n, s);
    for (int i = 0; i < n; ++i) a.at(i, k) = perm[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k)
      d.at(i, k) = (static_cast<double>(a.at(i, k)) - s.next_unit()) / n;
  return d;
}

inline DesignFamily gen_ilh(int n, int m, int t, const SeedSpec& seed) {
  check_dims(n, m, t);
  DesignFamily family;
  family.scheme = Scheme::ilh;
  family.provenance = seed;
  for (int r = 0; r < t; ++r)
    family.slices.push_back(gen_ordinary_lh(n, m, seed.child(static_cast<std::uint32_t>(r))));
  return family;
}

// Sliced Latin hypercubes: t Latin hypercubes on {1..n} whose cross-slice
// level expansion makes the nt-row stack a Latin hypercube on {1..nt}.
namespace detail {

// Spread each within-slice level across its own run of t stack levels: the t
// rows holding level v (one per slice) receive t*(v-1)+perm. Positions of
// every level are taken before any value is rewritten; the expanded values
// overlap the original level range.
inline void stack_slice_levels(std::vector<LatinHypercube>& a, int n, int t, Stream& s) {
  const int m = a.front().m;
  std::vector<int> row_of_level(static_cast<std::size_t>(t) * n);
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < t; ++r)
      for (int i = 0; i < n; ++i)
        row_of_level[static_cast<std::size_t>(r) * n +
                     (a[static_cast<std::size_t>(r)].at(i, k) - 1)] = i;
    for (int level = 1; level <= n; ++level) {
      const auto perm = uniform_permutation(t, s);
      for (int r = 0; r < t; ++r)
        a[static_cast<std::size_t>(r)].at(
            row_of_level[static_cast<std::size_t>(r) * n + (level - 1)], k) =
            t * (level - 1) + perm[static_cast<std::size_t>(r)];
    }
  }
}

}  // namespace detail

inline DesignFamily gen_slh(int n, int m, int t, const SeedSpec& seed) {
  check_dims(n, m, t);
  Stream s = seed.open();
  std::vector<LatinHypercube> a(static_cast<std::size_t>(t));
  for (int r = 0; r < t; ++r) {
    a[static_cast<std::size_t>(r)] = LatinHypercube(n, m);
    for (int k = 0; k < m; ++k) {
      const auto perm = uniform_permutation(n, s);
      for (int i = 0; i < n; ++i)
        a[static_cast<std::size_t>(r)].at(i, k) = perm[static_cast<std::size_t>(i)];
    }
  }
  detail::stack_slice_levels(a, n, t, s);
  DesignFamily family;
  family.scheme = Scheme::slh;
  family.provenance = seed;
  for (int r = 0; r < t; ++r) {
    DesignMatrix d(n, m, n * t);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < m; ++k)
        d.at(i, k) =
            (static_cast<double>(a[static_cast<std::size_t>(r)].at(i, k)) - s.next_unit()) /
            (static_cast<double>(n) * t);
    family.slices.push_back(std::move(d));
  }
  return family;
}

}  // namespace ndlhs
