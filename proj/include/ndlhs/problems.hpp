#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlhs/designs.hpp"
#include "ndlhs/io.hpp"
#include "ndlhs/rng.hpp"
#include "ndlhs/simplex.hpp"
#include "ndlhs/tolerances.hpp"

namespace ndlhs {

// A stochastic program evaluated on one batch: value() is the optimal
// objective of the sample average problem over the rows of the design.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual int dimension() const = 0;
  virtual double value(const DesignMatrix& d) const = 0;
  virtual std::string describe() const = 0;
};

// Finite distribution on strictly increasing support points.
struct DiscreteMarginal {
  std::vector<double> values;
  std::vector<double> probs;
};

inline void validate_marginal(const DiscreteMarginal& mar) {
  if (mar.values.empty() || mar.values.size() != mar.probs.size())
    throw std::invalid_argument("marginal: values and probs must be non-empty and equal length");
  for (std::size_t i = 1; i < mar.values.size(); ++i)
    if (!(mar.values[i - 1] < mar.values[i]))
      throw std::invalid_argument("marginal: values must be strictly increasing");
  double sum = 0.0;
  for (double p : mar.probs) {
    if (p <= 0.0) throw std::invalid_argument("marginal: probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::prob_sum)
    throw std::invalid_argument("marginal: probabilities sum to " + std::to_string(sum));
}

// Inverse transform of u in (0,1]. The last cumulative weight is forced to
// one so rounding in the running sum can never push u past the support.
inline double transform(const DiscreteMarginal& mar, double u) {
  if (!(u > 0.0) || u > 1.0)
    throw std::domain_error("transform: u must lie in (0,1]");
  std::vector<double> cum(mar.probs.size());
  double run = 0.0;
  for (std::size_t i = 0; i < mar.probs.size(); ++i) {
    run += mar.probs[i];
    cum[i] = run;
  }
  cum.back() = 1.0;
  const auto it = std::lower_bound(cum.begin(), cum.end(), u);
  return mar.values[static_cast<std::size_t>(it - cum.begin())];
}

namespace detail {

// index of the alpha quantile in a sample of n, with a guard for
// alpha*n sitting a rounding error away from an integer
inline int quantile_rank(double alpha, int n) {
  const double an = alpha * n;
  const double rounded = std::nearbyint(an);
  double r = std::abs(an - rounded) <= tol::integer_guard ? rounded : std::ceil(an);
  if (r < 1.0) r = 1.0;
  if (r > n) r = n;
  return static_cast<int>(r);
}

}  // namespace detail

// Quantity decision against uniform or discrete demand: order x, pay 1-alpha
// per unit of surplus and alpha per unit of shortage. With several components
// the demand of a scenario is the sum of the componentwise transforms.
class NewsvendorProblem : public Problem {
 public:
  explicit NewsvendorProblem(double alpha) : alpha_(alpha) { check(); }
  NewsvendorProblem(double alpha, DiscreteMarginal demand, int components = 1)
      : alpha_(alpha), demand_(std::move(demand)), discrete_(true),
        components_(components) {
    check();
    validate_marginal(demand_);
    if (components_ < 1)
      throw std::invalid_argument("newsvendor: components must be positive");
  }

  int dimension() const override { return components_; }

  double value(const DesignMatrix& d) const override {
    if (d.cols != components_)
      throw std::invalid_argument("newsvendor: design must have " +
                                  std::to_string(components_) + " column(s)");
    const int n = d.rows;
    std::vector<double> demand(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < components_; ++k) {
        const double u = d.at(i, k);
        if (!(u > 0.0) || u > 1.0)
          throw std::domain_error("newsvendor: design entries must lie in (0,1]");
        demand[static_cast<std::size_t>(i)] += discrete_ ? transform(demand_, u) : u;
      }
    std::sort(demand.begin(), demand.end());
    const double x = demand[static_cast<std::size_t>(detail::quantile_rank(alpha_, n) - 1)];
    double total = 0.0;
    for (double v : demand)
      total += v <= x ? (1.0 - alpha_) * (x - v) : alpha_ * (v - x);
    return total / n;
  }

  std::string describe() const override {
    std::ostringstream out;
    out << "newsvendor alpha=" << alpha_;
    if (discrete_) out << " support=" << demand_.values.size();
    if (components_ > 1) out << " components=" << components_;
    return out.str();
  }

  double alpha() const { return alpha_; }

 private:
  void check() const {
    if (!(alpha_ > 0.0) || !(alpha_ < 1.0))
      throw std::invalid_argument("newsvendor: alpha must lie in (0,1)");
  }

  double alpha_;
  DiscreteMarginal demand_;
  bool discrete_ = false;
  int components_ = 1;
};

// Affine dependence of one constraint entry on one noise coordinate:
// column 0 is the right hand side, column j >= 1 is the multiplier of
// first-stage variable j in that row.
struct Binding {
  int row = 0;   // 1-based
  int col = 0;   // 0 = rhs, j >= 1 = first-stage column j
  double a = 0.0, b = 0.0;
  int k = 0;     // 1-based noise coordinate
};

// min c'x + mean_i min_y { q'y : T(xi_i) x + W y {<=,=,>=} h(xi_i), y >= 0 }
// with x between x_lower and x_upper.
struct TwoStageLp {
  int dim = 0;  // noise coordinates per scenario
  std::vector<double> c;
  std::vector<double> x_lower, x_upper;
  std::vector<double> q;
  std::vector<std::vector<double>> W;
  std::vector<std::vector<double>> T;
  std::vector<double> h;
  std::vector<Sense> senses;
  std::vector<Binding> bindings;
};

inline void validate_two_stage(const TwoStageLp& ts) {
  const int p = static_cast<int>(ts.c.size());
  const int d = static_cast<int>(ts.q.size());
  const int rows = static_cast<int>(ts.W.size());
  if (p < 1) throw std::invalid_argument("two-stage: no first-stage variables");
  if (d < 1) throw std::invalid_argument("two-stage: no second-stage variables");
  if (rows < 1) throw std::invalid_argument("two-stage: no rows");
  if (ts.dim < 1) throw std::invalid_argument("two-stage: noise dimension must be positive");
  if (static_cast<int>(ts.T.size()) != rows || static_cast<int>(ts.h.size()) != rows ||
      static_cast<int>(ts.senses.size()) != rows)
    throw std::invalid_argument("two-stage: W, T, h, and senses row counts disagree");
  for (const auto& row : ts.W)
    if (static_cast<int>(row.size()) != d)
      throw std::invalid_argument("two-stage: W row width disagrees with q");
  for (const auto& row : ts.T)
    if (static_cast<int>(row.size()) != p)
      throw std::invalid_argument("two-stage: T row width disagrees with c");
  if (!ts.x_lower.empty() && static_cast<int>(ts.x_lower.size()) != p)
    throw std::invalid_argument("two-stage: x_lower width disagrees with c");
  if (!ts.x_upper.empty() && static_cast<int>(ts.x_upper.size()) != p)
    throw std::invalid_argument("two-stage: x_upper width disagrees with c");
  for (const Binding& bd : ts.bindings) {
    if (bd.row < 1 || bd.row > rows)
      throw std::invalid_argument("two-stage: binding row " + std::to_string(bd.row) +
                                  " outside 1.." + std::to_string(rows));
    if (bd.col < 0 || bd.col > p)
      throw std::invalid_argument("two-stage: binding column " + std::to_string(bd.col) +
                                  " outside 0.." + std::to_string(p));
    if (bd.k < 1 || bd.k > ts.dim)
      throw std::invalid_argument("two-stage: binding noise index " + std::to_string(bd.k) +
                                  " outside 1.." + std::to_string(ts.dim));
  }
}

class TwoStageLpProblem : public Problem {
 public:
  explicit TwoStageLpProblem(TwoStageLp data) : ts_(std::move(data)) {
    validate_two_stage(ts_);
  }

  int dimension() const override { return ts_.dim; }

  // optimal value of the extensive form over the n rows of the design
  double value(const DesignMatrix& d) const override {
    if (d.cols != ts_.dim)
      throw std::invalid_argument("two-stage: design has " + std::to_string(d.cols) +
                                  " columns, problem needs " + std::to_string(ts_.dim));
    const int n = d.rows;
    const int p = static_cast<int>(ts_.c.size());
    const int nd = static_cast<int>(ts_.q.size());
    const int rows = static_cast<int>(ts_.W.size());
    DenseLP lp;
    lp.objective = ts_.c;
    for (int i = 0; i < n; ++i)
      for (double qv : ts_.q) lp.objective.push_back(qv / n);
    const int nv = p + n * nd;
    lp.lower.assign(static_cast<std::size_t>(nv), 0.0);
    lp.upper.assign(static_cast<std::size_t>(nv), detail::inf);
    for (int j = 0; j < p; ++j) {
      if (!ts_.x_lower.empty()) lp.lower[static_cast<std::size_t>(j)] = ts_.x_lower[static_cast<std::size_t>(j)];
      if (!ts_.x_upper.empty()) lp.upper[static_cast<std::size_t>(j)] = ts_.x_upper[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> hrow = ts_.h;
      std::vector<std::vector<double>> trow = ts_.T;
      for (const Binding& bd : ts_.bindings) {
        const double v = bd.a + bd.b * d.at(i, bd.k - 1);
        if (bd.col == 0) hrow[static_cast<std::size_t>(bd.row - 1)] = v;
        else trow[static_cast<std::size_t>(bd.row - 1)][static_cast<std::size_t>(bd.col - 1)] = v;
      }
      for (int r = 0; r < rows; ++r) {
        std::vector<double> full(static_cast<std::size_t>(nv), 0.0);
        for (int j = 0; j < p; ++j) full[static_cast<std::size_t>(j)] = trow[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        for (int j = 0; j < nd; ++j)
          full[static_cast<std::size_t>(p + i * nd + j)] = ts_.W[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        lp.matrix.push_back(std::move(full));
        lp.rhs.push_back(hrow[static_cast<std::size_t>(r)]);
        lp.senses.push_back(ts_.senses[static_cast<std::size_t>(r)]);
      }
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
      throw std::runtime_error(std::string("two-stage: extensive form is ") +
                               (sol.status == LpStatus::infeasible ? "infeasible" : "unbounded"));
    return sol.value;
  }

  std::string describe() const override {
    std::ostringstream out;
    out << "twostage p=" << ts_.c.size() << " d=" << ts_.q.size()
        << " rows=" << ts_.W.size() << " dim=" << ts_.dim;
    return out.str();
  }

  const TwoStageLp& data() const { return ts_; }

 private:
  TwoStageLp ts_;
};

// ---------------------------------------------------------------------------
// text formats

// Keyword-per-line description of a TwoStageLp; see fixtures for examples.
inline TwoStageLp parse_two_stage_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  TwoStageLp ts;
  int p = -1, d = -1, rows = -1;
  std::string line;
  int lineno = 0;
  auto numbers = [](std::istringstream& is, int count, const std::string& where) {
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (count >= 0 && static_cast<int>(out.size()) != count)
      throw io_error(where + ": expected " + std::to_string(count) + " numbers, got " +
                     std::to_string(out.size()));
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::istringstream is(t);
    std::string key;
    is >> key;
    if (key == "p" || key == "d" || key == "rows" || key == "m") {
      int v;
      if (!(is >> v) || v < 1) throw io_error(where + ": bad " + key);
      (key == "p" ? p : key == "d" ? d : key == "rows" ? rows : ts.dim) = v;
    } else if (key == "c") {
      ts.c = numbers(is, p, where);
    } else if (key == "x_lower") {
      ts.x_lower = numbers(is, p, where);
    } else if (key == "x_upper") {
      ts.x_upper = numbers(is, p, where);
    } else if (key == "q") {
      ts.q = numbers(is, d, where);
    } else if (key == "W") {
      ts.W.push_back(numbers(is, d, where));
    } else if (key == "T") {
      ts.T.push_back(numbers(is, p, where));
    } else if (key == "h") {
      ts.h = numbers(is, rows, where);
    } else if (key == "sense") {
      std::string tok;
      while (is >> tok) {
        if (tok == "le") ts.senses.push_back(Sense::le);
        else if (tok == "eq") ts.senses.push_back(Sense::eq);
        else if (tok == "ge") ts.senses.push_back(Sense::ge);
        else throw io_error(where + ": unknown sense '" + tok + "'");
      }
    } else if (key == "bind") {
      std::string rest;
      std::getline(is, rest);
      Binding bd;
      if (std::sscanf(rest.c_str(), " ( %d , %d ) -> %lf + %lf * xi [ %d ]",
                      &bd.row, &bd.col, &bd.a, &bd.b, &bd.k) != 5)
        throw io_error(where + ": binding must look like (row,col) -> a + b*xi[k]");
      ts.bindings.push_back(bd);
    } else {
      throw io_error(where + ": unknown keyword '" + key + "'");
    }
  }
  if (p < 1 || d < 1 || rows < 1 || ts.dim < 1)
    throw io_error(path + ": p, d, rows, and m must all be declared");
  validate_two_stage(ts);
  return ts;
}

// One-line key=value problem description: either
//   problem=newsvendor alpha=... [values=a,b,... probs=p,q,...]
// or
//   problem=twostage file=relative/or/absolute.path
inline std::unique_ptr<Problem> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream is(t);
    std::string tok;
    while (is >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos)
        throw io_error(path + ": expected key=value tokens, got '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  if (!kv.count("problem")) throw io_error(path + ": missing problem=");
  const std::string kind = kv["problem"];
  if (kind == "newsvendor") {
    if (!kv.count("alpha")) throw io_error(path + ": newsvendor needs alpha=");
    const double alpha = detail::parse_double(kv["alpha"], path + " alpha");
    if (kv.count("values") != kv.count("probs"))
      throw io_error(path + ": values= and probs= must come together");
    if (kv.count("values")) {
      DiscreteMarginal mar;
      for (const std::string& f : detail::split(kv["values"], ','))
        mar.values.push_back(detail::parse_double(f, path + " values"));
      for (const std::string& f : detail::split(kv["probs"], ','))
        mar.probs.push_back(detail::parse_double(f, path + " probs"));
      int components = 1;
      if (kv.count("components"))
        components =
            static_cast<int>(detail::parse_int(kv["components"], path + " components"));
      return std::make_unique<NewsvendorProblem>(alpha, std::move(mar), components);
    }
    if (kv.count("components"))
      throw io_error(path + ": components= needs a discrete demand (values=/probs=)");
    return std::make_unique<NewsvendorProblem>(alpha);
  }
  if (kind == "twostage") {
    if (!kv.count("file")) throw io_error(path + ": twostage needs file=");
    std::filesystem::path target(kv["file"]);
    if (target.is_relative())
      target = std::filesystem::path(path).parent_path() / target;
    return std::make_unique<TwoStageLpProblem>(parse_two_stage_file(target.string()));
  }
  throw io_error(path + ": unknown problem '" + kind + "'");
}

// ---------------------------------------------------------------------------
// monotonicity probing

enum class Trend { increasing, decreasing, flat, violated };

inline const char* trend_name(Trend tr) {
  switch (tr) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::flat: return "flat";
    case Trend::violated: return "violated";
  }
  return "?";
}

struct ProbeWitness {
  int row = 0;        // 1-based design row
  double x = 0.0;     // original entry
  double delta = 0.0; // value change for a +step move
};

struct CoordinateTrend {
  Trend trend = Trend::flat;
  int probes_used = 0;
  int probes_skipped = 0;
  ProbeWitness up, down;  // opposing witnesses when violated
};

// Random one-entry perturbations of the design, one report per coordinate.
// Probes that would leave (0,1] are skipped and counted.
inline std::vector<CoordinateTrend> check_monotonicity(const Problem& problem,
                                                       const DesignMatrix& d,
                                                       Stream& stream, int probes = 200,
                                                       double step = 0.0) {
  if (d.rows < 1 || d.cols < 1) throw std::invalid_argument("empty design");
  if (probes < 1) throw std::invalid_argument("probes must be positive");
  if (step == 0.0) step = 1.0 / (4.0 * d.resolution);
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const double v0 = problem.value(d);
  const double tol_flat = tol::trend_flat * (1.0 + std::abs(v0));
  std::vector<CoordinateTrend> out(static_cast<std::size_t>(d.cols));
  DesignMatrix work = d;
  for (int k = 0; k < d.cols; ++k) {
    CoordinateTrend& ct = out[static_cast<std::size_t>(k)];
    bool pos = false, neg = false;
    for (int pnum = 0; pnum < probes; ++pnum) {
      const int i = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(d.rows)));
      const double x = d.at(i, k);
      for (double moved : {x + step, x - step}) {
        if (!(moved > 0.0) || moved > 1.0) {
          ++ct.probes_skipped;
          continue;
        }
        work.at(i, k) = moved;
        const double delta = (problem.value(work) - v0) * (moved > x ? 1.0 : -1.0);
        work.at(i, k) = x;
        ++ct.probes_used;
        if (delta > tol_flat && !pos) {
          pos = true;
          ct.up = {i + 1, x, delta};
        } else if (delta < -tol_flat && !neg) {
          neg = true;
          ct.down = {i + 1, x, delta};
        }
      }
    }
    ct.trend = pos && neg ? Trend::violated
               : pos      ? Trend::increasing
               : neg      ? Trend::decreasing
                          : Trend::flat;
  }
  return out;
}

}  // namespace ndlhs
