// Test-side oracle shared by the simplex suite and the acceptance gate:
// brute-force LP solving by vertex enumeration, plus a generator of small
// box-bounded random programs. Sound only when every variable has finite
// bounds, which the generator guarantees.
#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ndlhs/rng.hpp"
#include "ndlhs/simplex.hpp"

namespace lptest {

struct OracleResult {
  bool feasible = false;
  double value = 0.0;
};

inline bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-9) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.resize(b.size());
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Enumerate candidate vertices from every n-subset of {rows taken as
// equalities, tight variable bounds}, keep the feasible minimum.
inline OracleResult brute_force_lp(const ndlhs::DenseLP& lp) {
  const double inf = std::numeric_limits<double>::infinity();
  const int nv = static_cast<int>(lp.objective.size());
  std::vector<std::vector<double>> pool_a;
  std::vector<double> pool_b;
  for (std::size_t i = 0; i < lp.matrix.size(); ++i) {
    pool_a.push_back(lp.matrix[i]);
    pool_b.push_back(lp.rhs[i]);
  }
  for (int j = 0; j < nv; ++j) {
    for (double bound : {lp.lower.empty() ? 0.0 : lp.lower[j],
                         lp.upper.empty() ? inf : lp.upper[j]}) {
      if (!std::isfinite(bound)) continue;
      std::vector<double> row(nv, 0.0);
      row[j] = 1.0;
      pool_a.push_back(row);
      pool_b.push_back(bound);
    }
  }
  const int pool = static_cast<int>(pool_a.size());
  OracleResult out;
  std::vector<int> pick(nv);
  for (int i = 0; i < nv; ++i) pick[i] = i;
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < lp.matrix.size(); ++i) {
      double ax = 0.0;
      for (int j = 0; j < nv; ++j) ax += lp.matrix[i][j] * x[j];
      const double slack = ax - lp.rhs[i];
      const double tol = 1e-7 * (1.0 + std::abs(lp.rhs[i]));
      if (lp.senses[i] == ndlhs::Sense::le && slack > tol) return false;
      if (lp.senses[i] == ndlhs::Sense::ge && slack < -tol) return false;
      if (lp.senses[i] == ndlhs::Sense::eq && std::abs(slack) > tol) return false;
    }
    for (int j = 0; j < nv; ++j) {
      const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
      const double up = lp.upper.empty() ? inf : lp.upper[j];
      if (x[j] < lo - 1e-7 * (1.0 + std::abs(lo))) return false;
      if (std::isfinite(up) && x[j] > up + 1e-7 * (1.0 + std::abs(up))) return false;
    }
    return true;
  };
  if (pool < nv) return out;
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i : pick) {
      a.push_back(pool_a[i]);
      b.push_back(pool_b[i]);
    }
    std::vector<double> x;
    if (gauss_solve(std::move(a), std::move(b), x) && feasible(x)) {
      double v = 0.0;
      for (int j = 0; j < nv; ++j) v += lp.objective[j] * x[j];
      if (!out.feasible || v < out.value) {
        out.feasible = true;
        out.value = v;
      }
    }
    int i = nv - 1;
    while (i >= 0 && pick[i] == pool - nv + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < nv; ++k) pick[k] = pick[k - 1] + 1;
  }
  return out;
}

// 2..max_vars variables in a finite box, 1..max_rows rows with mixed senses
// and small integer coefficients.
inline ndlhs::DenseLP random_box_lp(ndlhs::Stream& s, int max_vars, int max_rows) {
  ndlhs::DenseLP lp;
  const int nv = 2 + static_cast<int>(s.next_below(static_cast<std::uint64_t>(max_vars - 1)));
  const int nr = 1 + static_cast<int>(s.next_below(static_cast<std::uint64_t>(max_rows)));
  for (int j = 0; j < nv; ++j)
    lp.objective.push_back(static_cast<double>(s.next_below(11)) - 5.0);
  for (int i = 0; i < nr; ++i) {
    std::vector<double> row;
    for (int j = 0; j < nv; ++j)
      row.push_back(static_cast<double>(s.next_below(11)) - 5.0);
    lp.matrix.push_back(row);
    lp.rhs.push_back(static_cast<double>(s.next_below(9)) - 2.0);
    const auto pick = s.next_below(4);
    lp.senses.push_back(pick == 3   ? ndlhs::Sense::eq
                        : pick == 2 ? ndlhs::Sense::ge
                                    : ndlhs::Sense::le);
  }
  for (int j = 0; j < nv; ++j) {
    lp.lower.push_back(0.0);
    lp.upper.push_back(1.0 + static_cast<double>(s.next_below(4)));
  }
  return lp;
}

}  // namespace lptest
