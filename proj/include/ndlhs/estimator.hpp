#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ndlhs/designs.hpp"
#include "ndlhs/io.hpp"
#include "ndlhs/oa.hpp"
#include "ndlhs/problems.hpp"
#include "ndlhs/rng.hpp"
#include "ndlhs/solh.hpp"

namespace ndlhs {

// How to build one batch family. For the OA-backed schemes the base array
// tag fixes the geometry, so n and t may be left 0 and are filled in; when
// given they must agree with the base.
struct SchemeSpec {
  Scheme scheme = Scheme::ilh;
  int n = 0, m = 0, t = 0;
  std::string oa;  // base array tag for solh/spolh/indbb, empty otherwise
};

inline DesignFamily generate_family(const SchemeSpec& spec, const SeedSpec& seed) {
  const bool oa_backed = spec.scheme == Scheme::solh || spec.scheme == Scheme::spolh ||
                         spec.scheme == Scheme::indbb;
  if (!oa_backed) {
    if (!spec.oa.empty())
      throw std::invalid_argument(std::string(scheme_name(spec.scheme)) +
                                  " does not take a base array");
    switch (spec.scheme) {
      case Scheme::mc: return gen_monte_carlo(spec.n, spec.m, spec.t, seed);
      case Scheme::ilh: return gen_ilh(spec.n, spec.m, spec.t, seed);
      default: return gen_slh(spec.n, spec.m, spec.t, seed);
    }
  }
  if (spec.oa.empty())
    throw std::invalid_argument(std::string(scheme_name(spec.scheme)) +
                                " needs a base array tag");
  const OaSpec base = parse_oa_tag(spec.oa);
  const int n_base = base.lam * base.s;
  if (spec.n != 0 && spec.n != n_base)
    throw std::invalid_argument("base array fixes n=" + std::to_string(n_base) +
                                ", got n=" + std::to_string(spec.n));
  DesignFamily family;
  if (spec.scheme == Scheme::indbb) {
    if (spec.t < 1) throw std::invalid_argument("indbb needs t");
    family = gen_indbb(base.lam, base.s, spec.m, spec.t, seed);
  } else if (spec.scheme == Scheme::spolh) {
    if (spec.t < 1 || spec.t > base.s)
      throw std::invalid_argument("spolh needs t in 1.." + std::to_string(base.s));
    family = gen_spolh(build_oa(base, spec.m + 1), spec.m, spec.t, seed);
  } else {
    if (spec.t != 0 && spec.t != base.s)
      throw std::invalid_argument("base array fixes t=" + std::to_string(base.s) +
                                  ", got t=" + std::to_string(spec.t));
    family = gen_solh(build_oa(base, spec.m + 1), spec.m, seed);
  }
  family.oa_tag = oa_tag(base);
  return family;
}

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double total = 0.0;
  for (double v : xs) total += v;
  return total / static_cast<double>(xs.size());
}

// sample standard deviation, divisor R-1, computed on data shifted by the
// first value so a constant sample comes out exactly zero
inline double sample_sd(const std::vector<double>& xs) {
  const std::size_t r = xs.size();
  if (r < 2) throw std::invalid_argument("sample_sd: need at least two values");
  double su = 0.0, sq = 0.0;
  for (double v : xs) {
    const double u = v - xs.front();
    su += u;
    sq += u * u;
  }
  const double var = (sq - su * su / static_cast<double>(r)) / static_cast<double>(r - 1);
  return std::sqrt(std::max(0.0, var));
}

}  // namespace detail

struct LowerBound {
  double value = 0.0;
  std::vector<double> per_batch;
};

// L = mean of v_n over the t batches of the family
inline LowerBound lower_bound(const DesignFamily& family, const Problem& problem) {
  if (family.slices.empty()) throw std::invalid_argument("lower_bound: family is empty");
  LowerBound out;
  out.per_batch.reserve(family.slices.size());
  for (std::size_t r = 0; r < family.slices.size(); ++r) {
    try {
      out.per_batch.push_back(problem.value(family.slices[r]));
    } catch (const std::exception& e) {
      throw std::runtime_error("batch " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  out.value = detail::mean_of(out.per_batch);
  return out;
}

struct ExperimentConfig {
  SchemeSpec scheme;
  int replicates = 0;
  SeedSpec seed;
  int jobs = 1;
};

struct ReplicateReport {
  Scheme scheme = Scheme::mc;
  std::string oa;
  int n = 0, t = 0, m = 0;
  int base_batches = 0;
  int replicates = 0;
  SeedSpec seed;
  std::vector<double> lower_bounds;               // one L per replicate
  std::vector<std::vector<double>> batch_values;  // R x t
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation of L over replicates
  double se = 0.0;  // sd / sqrt(R)
  double wall_seconds = 0.0;
};

// R independent replicates, replicate r generated from seed.child(r), so the
// result is identical for any job count.
inline ReplicateReport run_experiment(const ExperimentConfig& config, const Problem& problem) {
  if (config.replicates < 2)
    throw std::invalid_argument("run_experiment: need at least 2 replicates");
  const auto start = std::chrono::steady_clock::now();
  const int reps = config.replicates;
  ReplicateReport report;
  report.scheme = config.scheme.scheme;
  report.replicates = reps;
  report.seed = config.seed;
  report.lower_bounds.assign(static_cast<std::size_t>(reps), 0.0);
  report.batch_values.assign(static_cast<std::size_t>(reps), {});

  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::mutex gate;
  std::exception_ptr failure;
  int failed_replicate = 0;
  auto work = [&]() {
    for (;;) {
      if (stop.load()) return;
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        DesignFamily family = generate_family(config.scheme, config.seed.child(static_cast<std::uint32_t>(r)));
        if (r == 0) {
          report.n = family.n();
          report.t = family.t();
          report.m = family.m();
          report.base_batches = family.base_batches;
          report.oa = family.oa_tag;
        }
        LowerBound lb = lower_bound(family, problem);
        report.lower_bounds[static_cast<std::size_t>(r)] = lb.value;
        report.batch_values[static_cast<std::size_t>(r)] = std::move(lb.per_batch);
      } catch (...) {
        std::lock_guard<std::mutex> lock(gate);
        if (!failure || r < failed_replicate) {
          failure = std::current_exception();
          failed_replicate = r;
        }
        stop.store(true);
        return;
      }
    }
  };

  int jobs = config.jobs < 1 ? 1 : config.jobs;
  if (jobs > reps) jobs = reps;
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate " + std::to_string(failed_replicate + 1) + ": " +
                               e.what());
    }
  }

  report.mean = detail::mean_of(report.lower_bounds);
  report.sd = detail::sample_sd(report.lower_bounds);
  report.se = report.sd / std::sqrt(static_cast<double>(reps));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct CovarianceProbe {
  double covariance = 0.0;
  double se = 0.0;  // leave-one-out standard error
  int replicates = 0;
};

// Sample covariance of the first two batch values over R fresh families.
inline CovarianceProbe covariance_probe(const SchemeSpec& spec, const Problem& problem,
                                        int replicates, const SeedSpec& seed) {
  if (replicates < 100)
    throw std::invalid_argument("covariance_probe: need at least 100 replicates");
  const std::size_t reps = static_cast<std::size_t>(replicates);
  std::vector<double> x(reps), y(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    DesignFamily family = generate_family(spec, seed.child(static_cast<std::uint32_t>(r)));
    if (family.t() < 2)
      throw std::invalid_argument("covariance_probe: family must have at least 2 batches");
    x[r] = problem.value(family.slices[0]);
    y[r] = problem.value(family.slices[1]);
  }
  // shifted by the first pair so constant samples give exactly zero
  double su = 0.0, sv = 0.0, suv = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const double u = x[r] - x[0];
    const double v = y[r] - y[0];
    su += u;
    sv += v;
    suv += u * v;
  }
  const double nn = static_cast<double>(reps);
  CovarianceProbe out;
  out.replicates = replicates;
  out.covariance = (suv - su * sv / nn) / (nn - 1.0);
  std::vector<double> dropped(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const double u = x[i] - x[0];
    const double v = y[i] - y[0];
    dropped[i] = (suv - u * v - (su - u) * (sv - v) / (nn - 1.0)) / (nn - 2.0);
  }
  const double centre = detail::mean_of(dropped);
  double ss = 0.0;
  for (double d : dropped) ss += (d - centre) * (d - centre);
  out.se = std::sqrt((nn - 1.0) / nn * ss);
  return out;
}

struct ScalingPoint {
  int t = 0;
  double variance = 0.0;
  double mean = 0.0;
};

struct ScalingFit {
  bool defined = false;  // false when some variance is zero
  double slope = 0.0;
  double slope_se = 0.0;
  std::vector<ScalingPoint> points;
};

// Least-squares slope of log variance(L) against log t; the t-th entry of
// t_list runs with sub-stream seed.child(index).
inline ScalingFit scaling_regression(const SchemeSpec& spec, const Problem& problem,
                                     const std::vector<int>& t_list, int replicates,
                                     const SeedSpec& seed, int jobs = 1) {
  if (t_list.size() < 3)
    throw std::invalid_argument("scaling_regression: need at least 3 batch counts");
  ScalingFit fit;
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    SchemeSpec run = spec;
    run.t = t_list[i];
    ExperimentConfig config{run, replicates, seed.child(static_cast<std::uint32_t>(i)), jobs};
    ReplicateReport rep = run_experiment(config, problem);
    fit.points.push_back({t_list[i], rep.sd * rep.sd, rep.mean});
  }
  for (const ScalingPoint& p : fit.points)
    if (!(p.variance > 0.0)) return fit;
  const std::size_t k = fit.points.size();
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = std::log(static_cast<double>(fit.points[i].t));
    ys[i] = std::log(fit.points[i].variance);
  }
  const double xbar = detail::mean_of(xs), ybar = detail::mean_of(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("scaling_regression: batch counts must differ");
  fit.slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double resid = ys[i] - ybar - fit.slope * (xs[i] - xbar);
    sse += resid * resid;
  }
  fit.slope_se = std::sqrt(sse / static_cast<double>(k - 2) / sxx);
  fit.defined = true;
  return fit;
}

// ---------------------------------------------------------------------------
// report files: a one-row summary CSV and a per-replicate CSV, both carrying
// the provenance header

namespace detail {

inline void write_provenance(std::ofstream& out, const ReplicateReport& report) {
  out << "# scheme=" << scheme_name(report.scheme) << " n=" << report.n
      << " m=" << report.m << " t=" << report.t << " seed=" << report.seed.master_seed;
  if (!report.seed.stream_path.empty()) {
    out << " path=";
    for (std::size_t i = 0; i < report.seed.stream_path.size(); ++i)
      out << (i ? "." : "") << report.seed.stream_path[i];
  }
  out << " rng=" << rng_id;
  if (!report.oa.empty()) out << " oa=" << report.oa;
  if (report.base_batches > 0) out << " base_t=" << report.base_batches;
  out << "\n";
}

}  // namespace detail

inline void write_summary_csv(const ReplicateReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  detail::write_provenance(out, report);
  out << "scheme,n,t,m,replicates,seed,mean,se,sd,wall_seconds\n";
  out << scheme_name(report.scheme) << "," << report.n << "," << report.t << ","
      << report.m << "," << report.replicates << "," << report.seed.master_seed << ","
      << detail::format_value(report.mean) << "," << detail::format_value(report.se) << ","
      << detail::format_value(report.sd) << "," << detail::format_value(report.wall_seconds)
      << "\n";
  if (!out) throw io_error("write failed for " + path);
}

inline void write_replicates_csv(const ReplicateReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  detail::write_provenance(out, report);
  out << "replicate,batch,v_n\n";
  for (std::size_t r = 0; r < report.batch_values.size(); ++r)
    for (std::size_t b = 0; b < report.batch_values[r].size(); ++b)
      out << (r + 1) << "," << (b + 1) << ","
          << detail::format_value(report.batch_values[r][b]) << "\n";
  if (!out) throw io_error("write failed for " + path);
}

// Summary file only: statistics as stored, no per-replicate data attached.
inline ReplicateReport read_summary_csv(const std::string& summary_path) {
  ReplicateReport report;
  std::ifstream in(summary_path);
  if (!in) throw io_error("cannot open " + summary_path);
  std::map<std::string, std::string> kv;
  std::vector<std::string> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      detail::parse_header_tokens(t, kv);
      continue;
    }
    if (!header_seen) {
      if (t != "scheme,n,t,m,replicates,seed,mean,se,sd,wall_seconds")
        throw io_error(summary_path + ": unexpected column header '" + t + "'");
      header_seen = true;
      continue;
    }
    rows.push_back(t);
  }
  if (rows.size() != 1)
    throw io_error(summary_path + ": expected exactly one summary row, found " +
                   std::to_string(rows.size()));
  const std::vector<std::string> f = detail::split(rows.front(), ',');
  if (f.size() != 10) throw io_error(summary_path + ": summary row needs 10 fields");
  try {
    report.scheme = scheme_from_name(f[0]);
  } catch (const std::invalid_argument& e) {
    throw io_error(summary_path + ": " + e.what());
  }
  report.n = static_cast<int>(detail::parse_int(f[1], summary_path + " n"));
  report.t = static_cast<int>(detail::parse_int(f[2], summary_path + " t"));
  report.m = static_cast<int>(detail::parse_int(f[3], summary_path + " m"));
  report.replicates = static_cast<int>(detail::parse_int(f[4], summary_path + " replicates"));
  report.seed.master_seed =
      static_cast<std::uint64_t>(detail::parse_int(f[5], summary_path + " seed"));
  report.mean = detail::parse_double(f[6], summary_path + " mean");
  report.se = detail::parse_double(f[7], summary_path + " se");
  report.sd = detail::parse_double(f[8], summary_path + " sd");
  report.wall_seconds = detail::parse_double(f[9], summary_path + " wall_seconds");
  if (kv.count("path"))
    for (const std::string& part : detail::split(kv["path"], '.'))
      report.seed.stream_path.push_back(static_cast<std::uint32_t>(
          detail::parse_int(part, summary_path + " header path")));
  if (kv.count("oa")) report.oa = kv["oa"];
  if (kv.count("base_t"))
    report.base_batches =
        static_cast<int>(detail::parse_int(kv["base_t"], summary_path + " header base_t"));
  if (kv.count("rng") && kv["rng"] != rng_id)
    throw io_error(summary_path + ": generated with rng '" + kv["rng"] +
                   "', this build uses '" + rng_id + "'");
  return report;
}

// Reads both files back and recomputes the summary statistics from the
// per-replicate rows; disagreement beyond the consistency tolerance is an
// error, so a stale pairing of files cannot slip through.
inline ReplicateReport read_report(const std::string& summary_path,
                                   const std::string& replicates_path) {
  ReplicateReport report = read_summary_csv(summary_path);
  if (report.replicates < 2 || report.t < 1)
    throw io_error(summary_path + ": replicates and t must be positive");

  report.batch_values.assign(static_cast<std::size_t>(report.replicates),
                             std::vector<double>(static_cast<std::size_t>(report.t), 0.0));
  std::vector<int> filled(static_cast<std::size_t>(report.replicates), 0);
  {
    std::ifstream in(replicates_path);
    if (!in) throw io_error("cannot open " + replicates_path);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (!header_seen) {
        if (t != "replicate,batch,v_n")
          throw io_error(replicates_path + ": unexpected column header '" + t + "'");
        header_seen = true;
        continue;
      }
      const std::string where = replicates_path + ":" + std::to_string(lineno);
      const std::vector<std::string> f = detail::split(t, ',');
      if (f.size() != 3) throw io_error(where + ": expected replicate,batch,v_n");
      const int r = static_cast<int>(detail::parse_int(f[0], where));
      const int b = static_cast<int>(detail::parse_int(f[1], where));
      if (r < 1 || r > report.replicates)
        throw io_error(where + ": replicate " + std::to_string(r) + " outside 1.." +
                       std::to_string(report.replicates));
      if (b < 1 || b > report.t)
        throw io_error(where + ": batch " + std::to_string(b) + " outside 1.." +
                       std::to_string(report.t));
      report.batch_values[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(b - 1)] =
          detail::parse_double(f[2], where);
      ++filled[static_cast<std::size_t>(r - 1)];
    }
    for (int c : filled)
      if (c != report.t)
        throw io_error(replicates_path + ": expected " + std::to_string(report.t) +
                       " batches per replicate");
  }
  report.lower_bounds.resize(static_cast<std::size_t>(report.replicates));
  for (std::size_t r = 0; r < report.batch_values.size(); ++r)
    report.lower_bounds[r] = detail::mean_of(report.batch_values[r]);
  const double mean = detail::mean_of(report.lower_bounds);
  const double sd = detail::sample_sd(report.lower_bounds);
  const double se = sd / std::sqrt(static_cast<double>(report.replicates));
  const double scale = 1.0 + std::abs(mean);
  if (std::abs(mean - report.mean) > tol::report_consistency * scale ||
      std::abs(sd - report.sd) > tol::report_consistency * scale ||
      std::abs(se - report.se) > tol::report_consistency * scale)
    throw io_error(summary_path + ": summary disagrees with the per-replicate rows");
  return report;
}

}  // namespace ndlhs
