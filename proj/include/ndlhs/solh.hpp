#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/designs.hpp"
#include "ndlhs/oa.hpp"
#include "ndlhs/rng.hpp"

namespace ndlhs {

// Randomized copy of an array destined for slicing: uniform row permutation,
// uniform rearrangement of all but the last column, then an independent
// uniform symbol relabeling in every column. The last column stays in place
// so it can serve as the slicing column.
inline OrthogonalArray randomize_oa(const OrthogonalArray& oa, Stream& stream) {
  detail::check_levels(oa);
  OrthogonalArray out(oa.rows, oa.cols, oa.levels, oa.strength, oa.index);
  const auto row_perm = uniform_permutation(oa.rows, stream);
  std::vector<int> col_map(static_cast<std::size_t>(oa.cols));
  for (int j = 0; j < oa.cols; ++j) col_map[static_cast<std::size_t>(j)] = j;
  if (oa.cols >= 2) {
    const auto col_perm = uniform_permutation(oa.cols - 1, stream);
    for (int j = 0; j + 1 < oa.cols; ++j)
      col_map[static_cast<std::size_t>(j)] = col_perm[static_cast<std::size_t>(j)] - 1;
  }
  for (int i = 0; i < oa.rows; ++i)
    for (int j = 0; j < oa.cols; ++j)
      out.at(i, j) = oa.at(row_perm[static_cast<std::size_t>(i)] - 1,
                           col_map[static_cast<std::size_t>(j)]);
  for (int j = 0; j < oa.cols; ++j) {
    const auto sym = uniform_permutation(oa.levels, stream);
    for (int i = 0; i < oa.rows; ++i)
      out.at(i, j) = sym[static_cast<std::size_t>(out.at(i, j) - 1)];
  }
  return out;
}

namespace detail {

inline void check_solh_base(const OrthogonalArray& base, int m) {
  if (base.strength != 2)
    throw std::invalid_argument("sliced generation needs a declared strength-2 base");
  if (base.cols < 2)
    throw std::invalid_argument("base array needs a slicing column besides the points");
  if (m < 1 || m > base.cols - 1)
    throw std::invalid_argument("m must be in 1.." + std::to_string(base.cols - 1) +
                                " for this base array");
  const int t = base.levels;
  if (t < 2) throw std::invalid_argument("slicing needs at least 2 batches");
  if (base.rows % (t * t) != 0)
    throw std::invalid_argument("base rows must be a multiple of levels^2");
}

}  // namespace detail

// Sliced orthogonal-array-based Latin hypercube family: randomize the base,
// group rows by the last column, expand each in-slice symbol into its own run
// of lambda levels, then stack the t slice hypercubes and jitter.
inline DesignFamily gen_solh(const OrthogonalArray& base, int m, const SeedSpec& seed) {
  detail::check_solh_base(base, m);
  const int t = base.levels;
  const int lam = base.rows / (t * t);
  const int n = lam * t;

  Stream s = seed.open();
  OrthogonalArray randomized = randomize_oa(base, s);
  std::vector<OrthogonalArray> groups = slice_by_column(randomized, randomized.cols);

  std::vector<LatinHypercube> a(static_cast<std::size_t>(t));
  std::vector<int> occurrence(static_cast<std::size_t>(n));
  for (int r = 0; r < t; ++r) {
    const OrthogonalArray& g = groups[static_cast<std::size_t>(r)];
    LatinHypercube& lh = a[static_cast<std::size_t>(r)];
    lh = LatinHypercube(n, m);
    for (int k = 0; k < m; ++k) {
      std::vector<int> count(static_cast<std::size_t>(t) + 1, 0);
      for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(g.at(i, k))];
      for (int level = 1; level <= t; ++level)
        if (count[static_cast<std::size_t>(level)] != lam)
          throw std::invalid_argument(
              "base is not balanced: symbol " + std::to_string(level) + " appears " +
              std::to_string(count[static_cast<std::size_t>(level)]) + " times (want " +
              std::to_string(lam) + ") in a slice column");
      // occurrence rows per symbol are collected before any value is written
      std::vector<int> next(static_cast<std::size_t>(t) + 1, 0);
      for (int level = 1; level <= t; ++level)
        next[static_cast<std::size_t>(level)] = (level - 1) * lam;
      for (int i = 0; i < n; ++i)
        occurrence[static_cast<std::size_t>(next[static_cast<std::size_t>(g.at(i, k))]++)] = i;
      for (int level = 1; level <= t; ++level) {
        const auto perm = uniform_permutation(lam, s);
        for (int p = 0; p < lam; ++p)
          lh.at(occurrence[static_cast<std::size_t>((level - 1) * lam + p)], k) =
              (level - 1) * lam + perm[static_cast<std::size_t>(p)];
      }
    }
  }

  detail::stack_slice_levels(a, n, t, s);
  DesignFamily family;
  family.scheme = Scheme::solh;
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

// First t_used batches of the full family generated from the base; the rest
// of the stream is identical, so extending t_used only appends batches.
inline DesignFamily gen_spolh(const OrthogonalArray& base, int m, int t_used,
                              const SeedSpec& seed) {
  DesignFamily full = gen_solh(base, m, seed);
  if (t_used < 1 || t_used > full.t())
    throw std::invalid_argument("t_used must be in 1.." + std::to_string(full.t()));
  full.base_batches = full.t();
  full.slices.resize(static_cast<std::size_t>(t_used));
  full.scheme = Scheme::spolh;
  return full;
}

// t independent batches, each the first slice of its own randomization of the
// same base array.
inline DesignFamily gen_indbb(int lam, int s, int m, int t, const SeedSpec& seed) {
  if (t < 1) throw std::invalid_argument("t must be positive");
  OrthogonalArray base = bose_bush(lam, s, m + 1);
  DesignFamily family;
  family.scheme = Scheme::indbb;
  family.provenance = seed;
  family.base_batches = s;
  for (int j = 0; j < t; ++j) {
    DesignFamily one = gen_solh(base, m, seed.child(static_cast<std::uint32_t>(j)));
    family.slices.push_back(std::move(one.slices.front()));
  }
  return family;
}

struct PairBalanceCheck {
  bool pass = false;
  int col_a = 0, col_b = 0;    // 1-based witness columns
  int cell_a = 0, cell_b = 0;  // 1-based cell of the t x t grid
  int count = 0;
  int expected = 0;
};

// Bivariate balance of the stacked family: for every column pair, each cell
// of the t x t grid must hold exactly n/t of the n*t points.
inline PairBalanceCheck validate_pair_balance(const DesignFamily& family) {
  const int t = family.t();
  const int n = family.n();
  const int m = family.m();
  if (t < 1 || n < 1) throw std::invalid_argument("empty family");
  if (n % t != 0)
    throw std::invalid_argument("pair balance needs n divisible by t");
  const int lam = n / t;
  DesignMatrix stacked = family.stacked();
  PairBalanceCheck out;
  std::vector<int> counts(static_cast<std::size_t>(t) * t);
  for (int ka = 0; ka < m; ++ka)
    for (int kb = ka + 1; kb < m; ++kb) {
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < stacked.rows; ++i) {
        const int la = level_index(stacked.at(i, ka), t);
        const int lb = level_index(stacked.at(i, kb), t);
        ++counts[static_cast<std::size_t>(la - 1) * t + (lb - 1)];
      }
      for (int la = 1; la <= t; ++la)
        for (int lb = 1; lb <= t; ++lb) {
          const int c = counts[static_cast<std::size_t>(la - 1) * t + (lb - 1)];
          if (c != lam) {
            out.col_a = ka + 1;
            out.col_b = kb + 1;
            out.cell_a = la;
            out.cell_b = lb;
            out.count = c;
            out.expected = lam;
            return out;
          }
        }
    }
  out.pass = true;
  out.expected = lam;
  return out;
}

}  // namespace ndlhs
