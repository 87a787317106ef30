#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/tolerances.hpp"

namespace ndlhs {

enum class Sense { le, eq, ge };

// minimize objective . x subject to matrix x {<=,=,>=} rhs and
// lower <= x <= upper. Empty bound vectors mean 0 and +infinity.
struct DenseLP {
  std::vector<double> objective;
  std::vector<std::vector<double>> matrix;
  std::vector<double> rhs;
  std::vector<Sense> senses;
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> primal;  // one per variable
  std::vector<double> dual;    // one per constraint row
};

// All usable pivot candidates fell below tol::pivot_min, so unbounded and
// ill-conditioned cannot be told apart.
struct pivot_breakdown_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr double inf = std::numeric_limits<double>::infinity();

class Tableau {
 public:
  // columns: structural | slack/surplus | artificial, then the rhs column
  Tableau(int rows, int cols) : rows_(rows), cols_(cols),
                                t_(static_cast<std::size_t>(rows) * (cols + 1), 0.0),
                                basis_(static_cast<std::size_t>(rows), -1) {}

  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
  double& rhs(int i) { return at(i, cols_); }
  double rhs(int i) const { return at(i, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int basis(int i) const { return basis_[static_cast<std::size_t>(i)]; }
  void set_basis(int i, int j) { basis_[static_cast<std::size_t>(i)] = j; }

  void pivot(int pr, int pc) {
    const double p = at(pr, pc);
    for (int j = 0; j <= cols_; ++j) at(pr, j) /= p;
    for (int i = 0; i < rows_; ++i) {
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(pr, j);
    }
    basis_[static_cast<std::size_t>(pr)] = pc;
  }

  void dump(std::ostream& out, const char* label) const {
    out << label << " basis:";
    for (int i = 0; i < rows_; ++i) out << ' ' << basis(i);
    out << '\n';
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j <= cols_; ++j) out << (j ? " " : "  ") << at(i, j);
      out << '\n';
    }
  }

 private:
  int rows_, cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

// Smallest-index entering and leaving choices keep the walk cycle-free.
enum class IterateResult { optimal, unbounded };

inline IterateResult simplex_iterate(Tableau& tab, const std::vector<double>& cost,
                                     const std::vector<char>& can_enter,
                                     std::ostream* trace, const char* phase) {
  const int m = tab.rows(), ncols = tab.cols();
  std::vector<char> in_basis(static_cast<std::size_t>(ncols), 0);
  for (;;) {
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (int i = 0; i < m; ++i) in_basis[static_cast<std::size_t>(tab.basis(i))] = 1;
    int enter = -1;
    for (int j = 0; j < ncols && enter < 0; ++j) {
      if (!can_enter[static_cast<std::size_t>(j)] || in_basis[static_cast<std::size_t>(j)])
        continue;
      double r = cost[static_cast<std::size_t>(j)];
      for (int i = 0; i < m; ++i)
        r -= cost[static_cast<std::size_t>(tab.basis(i))] * tab.at(i, j);
      if (r < -tol::reduced_cost) enter = j;
    }
    if (enter < 0) return IterateResult::optimal;

    int leave = -1;
    bool tiny_only = false;
    double best_ratio = inf;
    for (int i = 0; i < m; ++i) {
      const double a = tab.at(i, enter);
      if (a < tol::pivot_min) {
        tiny_only = tiny_only || a > 0.0;
        continue;
      }
      const double ratio = tab.rhs(i) / a;
      const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
      if (leave < 0 || ratio < best_ratio - tie) {
        best_ratio = ratio;
        leave = i;
      } else if (ratio <= best_ratio + tie && tab.basis(i) < tab.basis(leave)) {
        leave = i;
      }
    }
    if (leave < 0) {
      if (tiny_only)
        throw pivot_breakdown_error(
            "pivot candidates in column " + std::to_string(enter + 1) + " are below " +
            std::to_string(tol::pivot_min) + "; rescale the problem");
      return IterateResult::unbounded;
    }
    if (trace) {
      *trace << phase << " enter=" << enter << " leave_row=" << leave << '\n';
      tab.dump(*trace, phase);
    }
    tab.pivot(leave, enter);
  }
}

}  // namespace detail

// Dense two-phase primal simplex. Deterministic by construction; throws
// pivot_breakdown_error when every usable pivot is numerically ambiguous.
inline LpSolution solve_lp(const DenseLP& lp, std::ostream* trace = nullptr) {
  const int nv = static_cast<int>(lp.objective.size());
  const int nr = static_cast<int>(lp.rhs.size());
  if (nv < 1) throw std::invalid_argument("solve_lp: no variables");
  if (static_cast<int>(lp.matrix.size()) != nr ||
      static_cast<int>(lp.senses.size()) != nr)
    throw std::invalid_argument("solve_lp: matrix, rhs, and senses sizes disagree");
  for (const auto& row : lp.matrix)
    if (static_cast<int>(row.size()) != nv)
      throw std::invalid_argument("solve_lp: matrix row width disagrees with objective");
  std::vector<double> lower = lp.lower, upper = lp.upper;
  if (lower.empty()) lower.assign(static_cast<std::size_t>(nv), 0.0);
  if (upper.empty()) upper.assign(static_cast<std::size_t>(nv), detail::inf);
  if (static_cast<int>(lower.size()) != nv || static_cast<int>(upper.size()) != nv)
    throw std::invalid_argument("solve_lp: bound vector sizes disagree");
  auto finite = [](double v) { return std::isfinite(v); };
  for (double v : lp.objective)
    if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite objective");
  for (const auto& row : lp.matrix)
    for (double v : row)
      if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite coefficient");
  for (double v : lp.rhs)
    if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite rhs");
  for (int j = 0; j < nv; ++j) {
    if (std::isnan(lower[static_cast<std::size_t>(j)]) ||
        std::isnan(upper[static_cast<std::size_t>(j)]))
      throw std::invalid_argument("solve_lp: NaN bound");
    if (lower[static_cast<std::size_t>(j)] > upper[static_cast<std::size_t>(j)])
      throw std::invalid_argument("solve_lp: empty bound interval for variable " +
                                  std::to_string(j + 1));
  }

  // Rewrite every variable as one or two nonnegative internal columns.
  enum class Mode { shift, negshift, split };
  struct VarMap {
    Mode mode;
    double offset;  // x = offset + x'  or  x = offset - x'
    int col;        // first internal column
  };
  std::vector<VarMap> vmap(static_cast<std::size_t>(nv));
  int icols = 0;
  for (int j = 0; j < nv; ++j) {
    const double lo = lower[static_cast<std::size_t>(j)];
    const double up = upper[static_cast<std::size_t>(j)];
    if (finite(lo))
      vmap[static_cast<std::size_t>(j)] = {Mode::shift, lo, icols++};
    else if (finite(up))
      vmap[static_cast<std::size_t>(j)] = {Mode::negshift, up, icols++};
    else {
      vmap[static_cast<std::size_t>(j)] = {Mode::split, 0.0, icols};
      icols += 2;
    }
  }

  // Internal rows: the original ones plus one x' <= up - lo row per
  // two-sided bound.
  std::vector<std::vector<double>> rows;
  std::vector<double> b;
  std::vector<Sense> senses;
  double constant = 0.0;
  std::vector<double> cost(static_cast<std::size_t>(icols), 0.0);
  for (int j = 0; j < nv; ++j) {
    const VarMap& vm = vmap[static_cast<std::size_t>(j)];
    const double cj = lp.objective[static_cast<std::size_t>(j)];
    switch (vm.mode) {
      case Mode::shift:
        constant += cj * vm.offset;
        cost[static_cast<std::size_t>(vm.col)] = cj;
        break;
      case Mode::negshift:
        constant += cj * vm.offset;
        cost[static_cast<std::size_t>(vm.col)] = -cj;
        break;
      case Mode::split:
        cost[static_cast<std::size_t>(vm.col)] = cj;
        cost[static_cast<std::size_t>(vm.col) + 1] = -cj;
        break;
    }
  }
  for (int i = 0; i < nr; ++i) {
    std::vector<double> row(static_cast<std::size_t>(icols), 0.0);
    double bi = lp.rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < nv; ++j) {
      const double a = lp.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a == 0.0) continue;
      const VarMap& vm = vmap[static_cast<std::size_t>(j)];
      switch (vm.mode) {
        case Mode::shift:
          bi -= a * vm.offset;
          row[static_cast<std::size_t>(vm.col)] = a;
          break;
        case Mode::negshift:
          bi -= a * vm.offset;
          row[static_cast<std::size_t>(vm.col)] = -a;
          break;
        case Mode::split:
          row[static_cast<std::size_t>(vm.col)] = a;
          row[static_cast<std::size_t>(vm.col) + 1] = -a;
          break;
      }
    }
    rows.push_back(std::move(row));
    b.push_back(bi);
    senses.push_back(lp.senses[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < nv; ++j) {
    const double lo = lower[static_cast<std::size_t>(j)];
    const double up = upper[static_cast<std::size_t>(j)];
    if (!finite(lo) || !finite(up)) continue;
    std::vector<double> row(static_cast<std::size_t>(icols), 0.0);
    row[static_cast<std::size_t>(vmap[static_cast<std::size_t>(j)].col)] = 1.0;
    rows.push_back(std::move(row));
    b.push_back(up - lo);
    senses.push_back(Sense::le);
  }
  const int m = static_cast<int>(rows.size());
  std::vector<double> row_sign(static_cast<std::size_t>(m), 1.0);
  for (int i = 0; i < m; ++i)
    if (b[static_cast<std::size_t>(i)] < 0.0) {
      row_sign[static_cast<std::size_t>(i)] = -1.0;
      b[static_cast<std::size_t>(i)] = -b[static_cast<std::size_t>(i)];
      for (double& v : rows[static_cast<std::size_t>(i)]) v = -v;
      Sense& sn = senses[static_cast<std::size_t>(i)];
      if (sn == Sense::le) sn = Sense::ge;
      else if (sn == Sense::ge) sn = Sense::le;
    }

  // column layout: structural | slack or surplus per row | artificials
  int n_slack = m;
  int n_art = 0;
  for (Sense sn : senses) n_art += sn != Sense::le;
  const int ncols = icols + n_slack + n_art;
  cost.resize(static_cast<std::size_t>(ncols), 0.0);
  detail::Tableau tab(m, ncols);
  std::vector<int> identity_col(static_cast<std::size_t>(m), -1);
  std::vector<double> phase1(static_cast<std::size_t>(ncols), 0.0);
  std::vector<char> can_enter1(static_cast<std::size_t>(ncols), 1);
  std::vector<char> can_enter2(static_cast<std::size_t>(ncols), 1);
  {
    int art = icols + n_slack;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < icols; ++j)
        tab.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      tab.rhs(i) = b[static_cast<std::size_t>(i)];
      const Sense sn = senses[static_cast<std::size_t>(i)];
      tab.at(i, icols + i) = sn == Sense::ge ? -1.0 : 1.0;  // slack or surplus
      if (sn == Sense::eq) tab.at(i, icols + i) = 0.0;
      if (sn == Sense::le) {
        tab.set_basis(i, icols + i);
        identity_col[static_cast<std::size_t>(i)] = icols + i;
      } else {
        tab.at(i, art) = 1.0;
        tab.set_basis(i, art);
        identity_col[static_cast<std::size_t>(i)] = art;
        phase1[static_cast<std::size_t>(art)] = 1.0;
        can_enter2[static_cast<std::size_t>(art)] = 0;
        ++art;
      }
    }
  }

  double bnorm = 1.0, cnorm = 1.0;
  for (double v : b) bnorm = std::max(bnorm, 1.0 + std::abs(v));
  for (double v : cost) cnorm = std::max(cnorm, 1.0 + std::abs(v));

  LpSolution out;
  if (n_art > 0) {
    detail::simplex_iterate(tab, phase1, can_enter1, trace, "phase1");
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (phase1[static_cast<std::size_t>(tab.basis(i))] > 0.0) art_sum += tab.rhs(i);
    if (art_sum > tol::primal_feas * bnorm) {
      out.status = LpStatus::infeasible;
      return out;
    }
    // best effort to remove zero-level artificials from the basis
    for (int i = 0; i < m; ++i) {
      if (phase1[static_cast<std::size_t>(tab.basis(i))] == 0.0) continue;
      for (int j = 0; j < icols + n_slack; ++j)
        if (std::abs(tab.at(i, j)) >= tol::pivot_min) {
          tab.pivot(i, j);
          break;
        }
    }
  }
  if (detail::simplex_iterate(tab, cost, can_enter2, trace, "phase2") ==
      detail::IterateResult::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  std::vector<double> xi(static_cast<std::size_t>(icols), 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis(i) < icols) xi[static_cast<std::size_t>(tab.basis(i))] = tab.rhs(i);
  out.primal.assign(static_cast<std::size_t>(nv), 0.0);
  for (int j = 0; j < nv; ++j) {
    const VarMap& vm = vmap[static_cast<std::size_t>(j)];
    switch (vm.mode) {
      case Mode::shift:
        out.primal[static_cast<std::size_t>(j)] = vm.offset + xi[static_cast<std::size_t>(vm.col)];
        break;
      case Mode::negshift:
        out.primal[static_cast<std::size_t>(j)] = vm.offset - xi[static_cast<std::size_t>(vm.col)];
        break;
      case Mode::split:
        out.primal[static_cast<std::size_t>(j)] =
            xi[static_cast<std::size_t>(vm.col)] - xi[static_cast<std::size_t>(vm.col) + 1];
        break;
    }
  }
  out.value = 0.0;
  for (int j = 0; j < nv; ++j)
    out.value += lp.objective[static_cast<std::size_t>(j)] * out.primal[static_cast<std::size_t>(j)];

  // simplex multipliers read off the columns that started as row identities
  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const int u = identity_col[static_cast<std::size_t>(i)];
    double r = 0.0;  // slack and artificial columns carry no cost in phase 2
    for (int k = 0; k < m; ++k)
      r -= cost[static_cast<std::size_t>(tab.basis(k))] * tab.at(k, u);
    y[static_cast<std::size_t>(i)] = -r;
  }

  // independent certificates on the internal standard form
  double primal_viol = 0.0;
  for (int i = 0; i < m; ++i) {
    double ax = 0.0;
    for (int j = 0; j < icols; ++j)
      ax += rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
    const double d = ax - b[static_cast<std::size_t>(i)];
    switch (senses[static_cast<std::size_t>(i)]) {
      case Sense::le: primal_viol = std::max(primal_viol, d); break;
      case Sense::ge: primal_viol = std::max(primal_viol, -d); break;
      case Sense::eq: primal_viol = std::max(primal_viol, std::abs(d)); break;
    }
  }
  for (double v : xi) primal_viol = std::max(primal_viol, -v);
  if (primal_viol > tol::primal_feas * bnorm)
    throw std::runtime_error("solve_lp: primal residual " + std::to_string(primal_viol) +
                             " exceeds its certificate bound");
  double dual_viol = 0.0;
  for (int j = 0; j < icols; ++j) {
    double r = cost[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i)
      r -= y[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    dual_viol = std::max(dual_viol, -r);
  }
  for (int i = 0; i < m; ++i) {
    if (senses[static_cast<std::size_t>(i)] == Sense::le)
      dual_viol = std::max(dual_viol, y[static_cast<std::size_t>(i)]);
    if (senses[static_cast<std::size_t>(i)] == Sense::ge)
      dual_viol = std::max(dual_viol, -y[static_cast<std::size_t>(i)]);
  }
  if (dual_viol > tol::dual_feas * cnorm)
    throw std::runtime_error("solve_lp: dual residual " + std::to_string(dual_viol) +
                             " exceeds its certificate bound");
  double by = 0.0;
  for (int i = 0; i < m; ++i) by += b[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  const double internal_value = out.value - constant;
  if (std::abs(internal_value - by) > tol::duality_gap * (1.0 + std::abs(out.value)))
    throw std::runtime_error("solve_lp: duality gap " +
                             std::to_string(std::abs(internal_value - by)) +
                             " exceeds its certificate bound");

  out.dual.assign(static_cast<std::size_t>(nr), 0.0);
  for (int i = 0; i < nr; ++i)
    out.dual[static_cast<std::size_t>(i)] =
        row_sign[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  out.status = LpStatus::optimal;
  if (trace) {
    *trace << "final value " << out.value << '\n';
    tab.dump(*trace, "final");
  }
  return out;
}

}  // namespace ndlhs
