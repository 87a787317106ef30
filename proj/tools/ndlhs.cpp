// Command line front end: generate batch designs, verify structural
// properties of designs and orthogonal arrays, run lower bound experiments,
// and render summary files as comparison tables.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ndlhs/estimator.hpp"
#include "ndlhs/io.hpp"
#include "ndlhs/oa.hpp"
#include "ndlhs/problems.hpp"
#include "ndlhs/solh.hpp"

namespace {

using namespace ndlhs;

std::string default_out_dir() {
  const char* env = std::getenv("NDLHS_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

std::vector<std::uint32_t> parse_stream_path(const std::string& text) {
  std::vector<std::uint32_t> out;
  if (text.empty()) return out;
  for (const std::string& part : detail::split(text, '.')) {
    const long long v = detail::parse_int(part, "--path");
    if (v < 0) throw std::invalid_argument("--path entries must be non-negative");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

std::string brace_list(const std::vector<int>& xs) {
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out + "}";
}

struct GenArgs {
  std::string scheme;
  int n = 0, m = 0, t = 0;
  std::uint64_t seed = 0;
  std::string path, oa, out;
};

int cmd_gen(const GenArgs& a) {
  SchemeSpec spec;
  spec.scheme = scheme_from_name(a.scheme);
  spec.n = a.n;
  spec.m = a.m;
  spec.t = a.t;
  spec.oa = a.oa;
  const SeedSpec seed{a.seed, parse_stream_path(a.path)};
  const DesignFamily family = generate_family(spec, seed);
  std::string out = a.out;
  if (out.empty()) {
    char name[128];
    std::snprintf(name, sizeof(name), "%s_n%d_m%d_t%d_seed%llu.csv",
                  scheme_name(family.scheme), family.n(), family.m(), family.t(),
                  static_cast<unsigned long long>(a.seed));
    out = join_path(default_out_dir(), name);
  }
  write_design_csv(family, out);
  std::printf("wrote %s (%d slices of %d x %d)\n", out.c_str(), family.t(), family.n(),
              family.m());
  return 0;
}

struct VerifyArgs {
  std::string oa_file, design_file;
  int strength = 2;
  std::vector<int> m_cols;
};

int cmd_verify_oa(const VerifyArgs& a) {
  const OrthogonalArray oa = read_oa_csv(a.oa_file, a.strength);
  std::printf("%s: %d rows, %d columns, %d levels\n", a.oa_file.c_str(), oa.rows, oa.cols,
              oa.levels);
  int rc = 0;
  const StrengthCheck chk = verify_strength(oa, a.strength);
  if (chk.pass) {
    std::printf("strength %d: pass (lambda=%d)\n", a.strength, chk.lambda);
  } else {
    rc = 1;
    std::printf("strength %d: FAIL columns %s tuple %s seen %d times, expected %d\n",
                a.strength, brace_list(chk.columns).c_str(), brace_list(chk.tuple).c_str(),
                chk.count, chk.expected);
  }
  const std::vector<DefectWitness> defects = coincidence_defect(oa);
  if (defects.empty()) {
    std::printf("coincidence defect: none\n");
  } else {
    for (const DefectWitness& w : defects)
      std::printf("coincidence defect: rows %d,%d agree on columns %s\n", w.row_a, w.row_b,
                  brace_list(w.columns).c_str());
  }
  if (!a.m_cols.empty()) {
    for (int r = 0; r <= static_cast<int>(a.m_cols.size()); ++r)
      std::printf("M(%s, %d) = %lld\n", brace_list(a.m_cols).c_str(), r,
                  m_count(oa, a.m_cols, r));
  }
  return rc;
}

int cmd_verify_design(const VerifyArgs& a) {
  const DesignFamily family = read_design_csv(a.design_file);
  std::printf("%s: scheme %s, %d slices of %d x %d\n", a.design_file.c_str(),
              scheme_name(family.scheme), family.t(), family.n(), family.m());
  int rc = 0;
  switch (family.scheme) {
    case Scheme::slh:
    case Scheme::solh: {
      const SlicedCheck chk = validate_sliced(family);
      if (chk.slices_pass) {
        std::printf("per-slice latin at n=%d: pass\n", family.n());
      } else {
        rc = 1;
        std::printf("per-slice latin at n=%d: FAIL slice %d column %d level %d\n",
                    family.n(), chk.failed_slice, chk.slice_detail.column,
                    chk.slice_detail.level);
      }
      if (chk.stacked_pass) {
        std::printf("stacked latin at n*t=%d: pass\n", family.n() * family.t());
      } else {
        rc = 1;
        std::printf("stacked latin at n*t=%d: FAIL column %d level %d\n",
                    family.n() * family.t(), chk.stacked_detail.column,
                    chk.stacked_detail.level);
      }
      if (family.scheme == Scheme::solh) {
        const PairBalanceCheck pb = validate_pair_balance(family);
        if (pb.pass) {
          std::printf("pair balance on the %d x %d grid: pass\n", family.t(), family.t());
        } else {
          rc = 1;
          std::printf(
              "pair balance on the %d x %d grid: FAIL columns %d,%d cell (%d,%d) holds %d "
              "points, expected %d\n",
              family.t(), family.t(), pb.col_a, pb.col_b, pb.cell_a, pb.cell_b, pb.count,
              pb.expected);
        }
      }
      break;
    }
    case Scheme::ilh:
    case Scheme::spolh:
    case Scheme::indbb: {
      bool ok = true;
      for (int r = 0; r < family.t(); ++r) {
        const LatinCheck chk =
            validate_latin(family.slices[static_cast<std::size_t>(r)], family.n());
        if (!chk.pass) {
          ok = false;
          rc = 1;
          std::printf("per-slice latin at n=%d: FAIL slice %d column %d level %d\n",
                      family.n(), r + 1, chk.column, chk.level);
          break;
        }
      }
      if (ok) std::printf("per-slice latin at n=%d: pass\n", family.n());
      break;
    }
    case Scheme::mc:
      std::printf("mc designs carry no latin structure; nothing to check\n");
      break;
  }
  return rc;
}

struct RunArgs {
  std::string problem;
  std::optional<double> alpha;
  std::vector<double> values, probs;
  std::optional<int> components;
  std::string scheme;
  int n = 0, m = 0, t = 0;
  std::string oa;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string path;
  int jobs = 0;
  std::string out_summary, out_replicates;
};

std::unique_ptr<Problem> make_problem(const RunArgs& a) {
  if (a.problem == "newsvendor") {
    if (!a.alpha) throw std::invalid_argument("--problem newsvendor needs --alpha");
    if (a.values.empty() != a.probs.empty())
      throw std::invalid_argument("--values and --probs go together");
    if (!a.values.empty())
      return std::make_unique<NewsvendorProblem>(
          *a.alpha, DiscreteMarginal{a.values, a.probs}, a.components.value_or(1));
    if (a.components)
      throw std::invalid_argument("--components needs --values/--probs");
    return std::make_unique<NewsvendorProblem>(*a.alpha);
  }
  if (a.alpha || a.components || !a.values.empty() || !a.probs.empty())
    throw std::invalid_argument(
        "--alpha/--values/--probs/--components only apply to --problem newsvendor");
  return load_problem(a.problem);
}

int cmd_run(const RunArgs& a) {
  const std::unique_ptr<Problem> problem = make_problem(a);
  SchemeSpec spec;
  spec.scheme = scheme_from_name(a.scheme);
  spec.n = a.n;
  spec.t = a.t;
  spec.oa = a.oa;
  spec.m = a.m > 0 ? a.m : problem->dimension();
  if (spec.m != problem->dimension())
    throw std::invalid_argument("problem dimension is " +
                                std::to_string(problem->dimension()) + ", but --m is " +
                                std::to_string(spec.m));
  ExperimentConfig config;
  config.scheme = spec;
  config.replicates = a.replicates;
  config.seed = SeedSpec{a.seed, parse_stream_path(a.path)};
  config.jobs = a.jobs;
  const ReplicateReport report = run_experiment(config, *problem);

  char base[160];
  std::snprintf(base, sizeof(base), "%s_n%d_t%d_R%d_seed%llu", scheme_name(report.scheme),
                report.n, report.t, report.replicates,
                static_cast<unsigned long long>(a.seed));
  const std::string summary_path =
      a.out_summary.empty() ? join_path(default_out_dir(), std::string(base) + "_summary.csv")
                            : a.out_summary;
  const std::string replicates_path =
      a.out_replicates.empty()
          ? join_path(default_out_dir(), std::string(base) + "_replicates.csv")
          : a.out_replicates;
  write_summary_csv(report, summary_path);
  write_replicates_csv(report, replicates_path);
  std::printf("%s | %s n=%d t=%d m=%d R=%d | mean=%.6g se=%.3g sd=%.3g wall=%.2fs\n",
              problem->describe().c_str(), scheme_name(report.scheme), report.n, report.t,
              report.m, report.replicates, report.mean, report.se, report.sd,
              report.wall_seconds);
  std::printf("wrote %s\n", summary_path.c_str());
  std::printf("wrote %s\n", replicates_path.c_str());
  return 0;
}

int cmd_table(const std::vector<std::string>& files) {
  // (n, scheme) keys the rows, t keys the columns
  std::map<std::pair<int, int>, std::map<int, ReplicateReport>> grid;
  std::set<int> t_values;
  for (const std::string& file : files) {
    const ReplicateReport rep = read_summary_csv(file);
    const std::pair<int, int> key{rep.n, static_cast<int>(rep.scheme)};
    if (!grid[key].emplace(rep.t, rep).second)
      throw std::invalid_argument(file + ": duplicate cell n=" + std::to_string(rep.n) +
                                  " scheme=" + scheme_name(rep.scheme) +
                                  " t=" + std::to_string(rep.t));
    t_values.insert(rep.t);
  }

  std::vector<std::string> header{"n", "scheme"};
  for (int t : t_values) header.push_back("t=" + std::to_string(t));
  std::vector<std::vector<std::string>> cells;
  for (const auto& [key, by_t] : grid) {
    std::vector<std::string> row{std::to_string(key.first),
                                 scheme_name(static_cast<Scheme>(key.second))};
    for (int t : t_values) {
      const auto it = by_t.find(t);
      if (it == by_t.end()) {
        row.push_back("-");
      } else {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.4f (%.2E)", it->second.mean, it->second.se);
        row.push_back(cell);
      }
    }
    cells.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : cells)
    for (std::size_t j = 0; j < row.size(); ++j)
      width[j] = std::max(width[j], row[j].size());
  const auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      // scheme column left-aligned, everything else right-aligned
      const int w = static_cast<int>(width[j]);
      std::printf(j ? "  " : "");
      if (j == 1)
        std::printf("%-*s", w, row[j].c_str());
      else
        std::printf("%*s", w, row[j].c_str());
    }
    std::printf("\n");
  };
  print_row(header);
  for (const auto& row : cells) print_row(row);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negatively dependent batch designs for sample average approximation"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Read option defaults from an INI/TOML file; command line flags take "
                 "precedence over file values");

  GenArgs g;
  CLI::App* gen = app.add_subcommand("gen", "Generate a design family and write it as CSV");
  gen->add_option("--scheme", g.scheme, "Design scheme: mc, ilh, slh, solh, spolh or indbb")
      ->required();
  gen->add_option("--n", g.n,
                  "Points per batch (OA-backed schemes infer it from --oa when omitted)");
  gen->add_option("--m", g.m, "Dimensions per point")->required();
  gen->add_option("--t", g.t,
                  "Batches in the family (solh infers it from --oa when omitted)");
  gen->add_option("--seed", g.seed, "Master seed")->capture_default_str();
  gen->add_option("--path", g.path, "Dot-separated sub-stream path, e.g. 3.1.4");
  gen->add_option("--oa", g.oa,
                  "Base orthogonal array for solh/spolh/indbb: bush:s=<s> or "
                  "bosebush:lam=<lam>,s=<s>");
  gen->add_option("--out", g.out,
                  "Output file (default <scheme>_n<n>_m<m>_t<t>_seed<seed>.csv under "
                  "$NDLHS_OUT_DIR, falling back to the working directory)");

  VerifyArgs v;
  CLI::App* verify = app.add_subcommand(
      "verify", "Check structural properties of an orthogonal array or design CSV");
  CLI::Option* oa_opt = verify->add_option("--oa", v.oa_file, "Orthogonal array CSV to check");
  CLI::Option* design_opt =
      verify->add_option("--design", v.design_file, "Design family CSV to check");
  oa_opt->excludes(design_opt);
  design_opt->excludes(oa_opt);
  verify->add_option("--strength", v.strength, "Declared strength for --oa checks")
      ->capture_default_str();
  verify->add_option("--m-count", v.m_cols,
                     "With --oa: columns u (1-based); prints M(u,r) for r=0..|u|");

  RunArgs r;
  r.jobs = std::max(1u, std::thread::hardware_concurrency());
  CLI::App* run = app.add_subcommand(
      "run", "Estimate the lower bound for a problem and write summary CSVs");
  run->add_option("--problem", r.problem,
                  "Problem file, or 'newsvendor' configured by --alpha and optionally "
                  "--values/--probs/--components")
      ->required();
  run->add_option("--alpha", r.alpha, "Newsvendor critical ratio in (0,1)");
  run->add_option("--values", r.values, "Demand values of a discrete newsvendor marginal");
  run->add_option("--probs", r.probs, "Demand probabilities matching --values");
  run->add_option("--components", r.components,
                  "Sum this many independent demand components (needs --values/--probs)");
  run->add_option("--scheme", r.scheme, "Design scheme: mc, ilh, slh, solh, spolh or indbb")
      ->required();
  run->add_option("--n", r.n,
                  "Points per batch (OA-backed schemes infer it from --oa when omitted)");
  run->add_option("--m", r.m, "Dimensions per point (default: the problem dimension)");
  run->add_option("--t", r.t,
                  "Batches in the family (solh infers it from --oa when omitted)");
  run->add_option("--oa", r.oa,
                  "Base orthogonal array for solh/spolh/indbb: bush:s=<s> or "
                  "bosebush:lam=<lam>,s=<s>");
  run->add_option("--replicates", r.replicates, "Independent replicates of the estimator")
      ->required();
  run->add_option("--seed", r.seed, "Master seed")->capture_default_str();
  run->add_option("--path", r.path, "Dot-separated sub-stream path, e.g. 3.1.4");
  run->add_option("--jobs", r.jobs, "Worker threads across replicates")
      ->capture_default_str();
  run->add_option("--out-summary", r.out_summary,
                  "Summary output file (default <scheme>_n<n>_t<t>_R<R>_seed<seed>"
                  "_summary.csv under $NDLHS_OUT_DIR)");
  run->add_option("--out-replicates", r.out_replicates,
                  "Per-replicate output file (default ..._replicates.csv under "
                  "$NDLHS_OUT_DIR)");

  std::vector<std::string> table_files;
  CLI::App* table = app.add_subcommand(
      "table", "Render summary CSVs as an aligned mean (se) comparison table");
  table->add_option("--in", table_files, "Summary CSV files, one per table cell")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(g);
    if (verify->parsed()) {
      if (oa_opt->count() > 0) return cmd_verify_oa(v);
      if (design_opt->count() > 0) return cmd_verify_design(v);
      std::fprintf(stderr, "verify needs exactly one of --oa or --design\n");
      return 2;
    }
    if (run->parsed()) return cmd_run(r);
    if (table->parsed()) return cmd_table(table_files);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
