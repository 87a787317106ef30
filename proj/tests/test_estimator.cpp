#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ndlhs/estimator.hpp"
#include "ndlhs/problems.hpp"

using namespace ndlhs;

namespace {

struct ConstantProblem : Problem {
  double c;
  explicit ConstantProblem(double c_) : c(c_) {}
  int dimension() const override { return 1; }
  double value(const DesignMatrix&) const override { return c; }
  std::string describe() const override { return "constant"; }
};

struct FussyProblem : Problem {
  int dimension() const override { return 1; }
  double value(const DesignMatrix& d) const override {
    for (int i = 0; i < d.rows; ++i)
      if (d.at(i, 0) < 0.2) throw std::runtime_error("entry below threshold");
    return 0.0;
  }
  std::string describe() const override { return "fussy"; }
};

SchemeSpec plain(Scheme scheme, int n, int m, int t) {
  SchemeSpec spec;
  spec.scheme = scheme;
  spec.n = n;
  spec.m = m;
  spec.t = t;
  return spec;
}

SchemeSpec backed(Scheme scheme, const std::string& oa, int m, int t = 0) {
  SchemeSpec spec;
  spec.scheme = scheme;
  spec.m = m;
  spec.t = t;
  spec.oa = oa;
  return spec;
}

}  // namespace

TEST_CASE("family generation covers every scheme tag") {
  const SeedSpec seed{404, {}};
  for (Scheme s : {Scheme::mc, Scheme::ilh, Scheme::slh}) {
    DesignFamily fam = generate_family(plain(s, 6, 2, 3), seed);
    REQUIRE(fam.scheme == s);
    REQUIRE(fam.n() == 6);
    REQUIRE(fam.t() == 3);
    REQUIRE(fam.m() == 2);
    REQUIRE(fam.oa_tag.empty());
  }
  REQUIRE(generate_family(plain(Scheme::slh, 6, 2, 3), seed).slices[0].resolution == 18);
  REQUIRE(generate_family(plain(Scheme::ilh, 6, 2, 3), seed).slices[0].resolution == 6);

  DesignFamily solh = generate_family(backed(Scheme::solh, "bush:s=4", 3), seed);
  REQUIRE(solh.scheme == Scheme::solh);
  REQUIRE(solh.n() == 4);
  REQUIRE(solh.t() == 4);
  REQUIRE(solh.oa_tag == "bush:s=4");
  REQUIRE(validate_sliced(solh).pass());
  REQUIRE(validate_pair_balance(solh).pass);

  DesignFamily spolh = generate_family(backed(Scheme::spolh, "bush:s=4", 2, 3), seed);
  REQUIRE(spolh.t() == 3);
  REQUIRE(spolh.base_batches == 4);
  REQUIRE(spolh.oa_tag == "bush:s=4");

  DesignFamily indbb = generate_family(backed(Scheme::indbb, "bosebush:lam=2,s=4", 3, 6), seed);
  REQUIRE(indbb.t() == 6);
  REQUIRE(indbb.n() == 8);
  REQUIRE(indbb.base_batches == 4);
  REQUIRE(indbb.oa_tag == "bosebush:lam=2,s=4");
}

TEST_CASE("scheme spec mismatches are rejected") {
  const SeedSpec seed{405, {}};
  REQUIRE_THROWS_AS(generate_family(backed(Scheme::solh, "", 2), seed), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_family(backed(Scheme::slh, "bush:s=4", 2, 4), seed),
                    std::invalid_argument);
  SchemeSpec wrong_t = backed(Scheme::solh, "bush:s=4", 2, 5);
  REQUIRE_THROWS_AS(generate_family(wrong_t, seed), std::invalid_argument);
  SchemeSpec wrong_n = backed(Scheme::solh, "bush:s=4", 2);
  wrong_n.n = 5;
  REQUIRE_THROWS_AS(generate_family(wrong_n, seed), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_family(backed(Scheme::spolh, "bush:s=4", 2, 5), seed),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(generate_family(backed(Scheme::indbb, "bosebush:lam=2,s=4", 2, 0), seed),
                    std::invalid_argument);
}

TEST_CASE("base array tags parse and print back") {
  OaSpec a = parse_oa_tag("bush:s=4");
  REQUIRE(a.family == OaSpec::Family::bush);
  REQUIRE(a.s == 4);
  REQUIRE(oa_tag(a) == "bush:s=4");
  OaSpec b = parse_oa_tag("bosebush:lam=2,s=8");
  REQUIRE(b.lam == 2);
  REQUIRE(b.s == 8);
  REQUIRE(oa_tag(b) == "bosebush:lam=2,s=8");
  REQUIRE(build_oa(b, 3).rows == 128);
  for (const char* bad : {"bush", "bush:s=0", "frog:s=2", "bosebush:lam=2", "bush:lam=2,s=4",
                          "bush:s=x", "bush:4"})
    REQUIRE_THROWS_AS(parse_oa_tag(bad), std::invalid_argument);
}

TEST_CASE("one batch means the bound is that batch") {
  NewsvendorProblem nv(0.4);
  DesignFamily fam = generate_family(plain(Scheme::ilh, 5, 1, 1), SeedSpec{7, {}});
  LowerBound lb = lower_bound(fam, nv);
  REQUIRE(lb.per_batch.size() == 1);
  REQUIRE(lb.value == lb.per_batch[0]);
}

TEST_CASE("constant batch values average without error") {
  ConstantProblem half(0.5);
  DesignFamily fam = generate_family(plain(Scheme::slh, 4, 1, 3), SeedSpec{8, {}});
  LowerBound lb = lower_bound(fam, half);
  REQUIRE(lb.value == 0.5);
  REQUIRE(lb.per_batch == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("batch evaluation failures name the batch") {
  DesignFamily fam = generate_family(plain(Scheme::ilh, 2, 2, 3), SeedSpec{9, {}});
  NewsvendorProblem nv(0.4);
  REQUIRE_THROWS_WITH(lower_bound(fam, nv), Catch::Matchers::ContainsSubstring("batch 1:"));
}

TEST_CASE("two replicates give the half-gap standard error") {
  ExperimentConfig config{plain(Scheme::ilh, 4, 1, 2), 2, SeedSpec{31, {}}, 1};
  NewsvendorProblem nv(0.4);
  ReplicateReport rep = run_experiment(config, nv);
  REQUIRE(rep.lower_bounds.size() == 2);
  REQUIRE(rep.batch_values.size() == 2);
  REQUIRE(rep.batch_values[0].size() == 2);
  const double gap = std::abs(rep.lower_bounds[0] - rep.lower_bounds[1]);
  REQUIRE_THAT(rep.se, Catch::Matchers::WithinRel(gap / 2.0, 1e-13));
  REQUIRE_THAT(rep.sd, Catch::Matchers::WithinRel(gap / std::sqrt(2.0), 1e-13));
  REQUIRE_THAT(rep.mean, Catch::Matchers::WithinRel(
                             (rep.lower_bounds[0] + rep.lower_bounds[1]) / 2.0, 1e-13));
  REQUIRE(rep.wall_seconds >= 0.0);
  REQUIRE(rep.n == 4);
  REQUIRE(rep.t == 2);
  REQUIRE(rep.m == 1);
}

TEST_CASE("constant problems report exactly zero spread") {
  ExperimentConfig config{plain(Scheme::mc, 3, 1, 3), 7, SeedSpec{32, {}}, 1};
  ConstantProblem half(0.5);
  ReplicateReport rep = run_experiment(config, half);
  REQUIRE(rep.mean == 0.5);
  REQUIRE(rep.sd == 0.0);
  REQUIRE(rep.se == 0.0);
}

TEST_CASE("replicates replay the documented sub-streams") {
  ExperimentConfig config{plain(Scheme::slh, 5, 1, 4), 6, SeedSpec{33, {2}}, 1};
  NewsvendorProblem nv(0.4);
  ReplicateReport rep = run_experiment(config, nv);
  for (int r = 0; r < 6; ++r) {
    DesignFamily fam =
        generate_family(config.scheme, config.seed.child(static_cast<std::uint32_t>(r)));
    LowerBound manual = lower_bound(fam, nv);
    REQUIRE(rep.lower_bounds[static_cast<std::size_t>(r)] == manual.value);
    REQUIRE(rep.batch_values[static_cast<std::size_t>(r)] == manual.per_batch);
  }
  ReplicateReport again = run_experiment(config, nv);
  REQUIRE(again.lower_bounds == rep.lower_bounds);
  ExperimentConfig other = config;
  other.seed.master_seed = 34;
  REQUIRE(run_experiment(other, nv).lower_bounds != rep.lower_bounds);
}

TEST_CASE("job count changes nothing but the clock") {
  NewsvendorProblem nv(0.4);
  ExperimentConfig serial{plain(Scheme::slh, 6, 1, 3), 16, SeedSpec{34, {}}, 1};
  ExperimentConfig pooled = serial;
  pooled.jobs = 4;
  ExperimentConfig flooded = serial;
  flooded.jobs = 64;
  ReplicateReport a = run_experiment(serial, nv);
  ReplicateReport b = run_experiment(pooled, nv);
  ReplicateReport c = run_experiment(flooded, nv);
  REQUIRE(a.lower_bounds == b.lower_bounds);
  REQUIRE(a.lower_bounds == c.lower_bounds);
  REQUIRE(a.batch_values == b.batch_values);
  REQUIRE(a.mean == b.mean);
  REQUIRE(a.sd == b.sd);
}

TEST_CASE("replicate failures surface the replicate index") {
  ExperimentConfig config{plain(Scheme::ilh, 8, 1, 2), 4, SeedSpec{35, {}}, 1};
  FussyProblem fussy;
  REQUIRE_THROWS_WITH(run_experiment(config, fussy),
                      Catch::Matchers::ContainsSubstring("replicate 1:") &&
                          Catch::Matchers::ContainsSubstring("batch"));
  REQUIRE_THROWS_AS(
      run_experiment(ExperimentConfig{plain(Scheme::ilh, 4, 1, 2), 1, SeedSpec{36, {}}, 1},
                     NewsvendorProblem(0.4)),
      std::invalid_argument);
}

TEST_CASE("independent batches hit the printed table cell") {
  ExperimentConfig config{plain(Scheme::ilh, 20, 1, 5), 1000, SeedSpec{500, {}}, 4};
  ReplicateReport rep = run_experiment(config, NewsvendorProblem(0.4));
  REQUIRE_THAT(rep.mean, Catch::Matchers::WithinAbs(0.1201, 2e-4));
  REQUIRE(rep.sd > 0.7 * 6.99e-4);
  REQUIRE(rep.sd < 1.3 * 6.99e-4);
  REQUIRE(rep.mean - 4.0 * rep.se <= 0.12);
}

TEST_CASE("sliced batches hit the printed table cell") {
  ExperimentConfig config{plain(Scheme::slh, 2, 1, 20), 1000, SeedSpec{501, {}}, 4};
  ReplicateReport rep = run_experiment(config, NewsvendorProblem(0.4));
  REQUIRE_THAT(rep.mean, Catch::Matchers::WithinAbs(0.1000, 2e-4));
  REQUIRE(rep.sd > 0.7 * 4.49e-4);
  REQUIRE(rep.sd < 1.3 * 4.49e-4);
}

// Per batch, a slice of any Latin scheme carries the same marginal law, so
// the estimator means must agree up to replication noise. Plain Monte Carlo
// is excluded: v_n is a nonlinear statistic, so its expectation under iid
// sampling genuinely differs at small n.
TEST_CASE("latin schemes agree on the mean") {
  NewsvendorProblem nv(0.4);
  std::vector<ReplicateReport> reps;
  for (const SchemeSpec& spec :
       {plain(Scheme::ilh, 4, 1, 4), plain(Scheme::slh, 4, 1, 4),
        backed(Scheme::solh, "bush:s=4", 1)})
    reps.push_back(run_experiment({spec, 800, SeedSpec{600, {}}, 4}, nv));
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = a + 1; b < reps.size(); ++b) {
      const double spread =
          std::sqrt(reps[a].se * reps[a].se + reps[b].se * reps[b].se);
      REQUIRE(std::abs(reps[a].mean - reps[b].mean) <= 4.0 * spread);
    }
}

TEST_CASE("covariance probe separates sliced from independent batches") {
  NewsvendorProblem nv(0.4);
  CovarianceProbe slh = covariance_probe(plain(Scheme::slh, 20, 1, 2), nv, 2000, SeedSpec{700, {}});
  REQUIRE(slh.covariance < 0.0);
  REQUIRE(std::abs(slh.covariance) > 3.0 * slh.se);
  CovarianceProbe ilh = covariance_probe(plain(Scheme::ilh, 20, 1, 2), nv, 2000, SeedSpec{701, {}});
  REQUIRE(std::abs(ilh.covariance) <= 3.0 * ilh.se);
  CovarianceProbe flat =
      covariance_probe(plain(Scheme::ilh, 4, 1, 2), ConstantProblem(0.37), 100, SeedSpec{702, {}});
  REQUIRE(flat.covariance == 0.0);
  REQUIRE(flat.se == 0.0);
  REQUIRE_THROWS_AS(covariance_probe(plain(Scheme::ilh, 4, 1, 2), nv, 99, SeedSpec{703, {}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(covariance_probe(plain(Scheme::ilh, 4, 1, 1), nv, 100, SeedSpec{704, {}}),
                    std::invalid_argument);
}

TEST_CASE("scaling fit recovers the known decay rates") {
  NewsvendorProblem nv(0.4);
  ScalingFit ilh = scaling_regression(plain(Scheme::ilh, 20, 1, 0), nv, {5, 10, 20}, 1000,
                                      SeedSpec{800, {}}, 4);
  REQUIRE(ilh.defined);
  REQUIRE(ilh.slope > -1.3);
  REQUIRE(ilh.slope < -0.7);
  REQUIRE(ilh.points.size() == 3);
  ScalingFit slh = scaling_regression(plain(Scheme::slh, 20, 1, 0), nv, {5, 10, 20}, 1000,
                                      SeedSpec{801, {}}, 4);
  REQUIRE(slh.defined);
  REQUIRE(slh.slope <= -2.0);
  ScalingFit flat = scaling_regression(plain(Scheme::ilh, 4, 1, 0), ConstantProblem(1.0),
                                       {2, 3, 4}, 100, SeedSpec{802, {}});
  REQUIRE_FALSE(flat.defined);
  REQUIRE_THROWS_AS(
      scaling_regression(plain(Scheme::ilh, 4, 1, 0), nv, {2, 3}, 100, SeedSpec{803, {}}),
      std::invalid_argument);
}

// With breakpoints on the n-grid each batch has a fixed per-component demand
// composition; only the cross-component pairing varies, and that pairing is
// independent across batches under both schemes, so slicing buys nothing.
// A single component would make every batch value constant (0/0 ratio), so
// the probe needs two.
TEST_CASE("integer breakpoints level the sliced and independent variances") {
  NewsvendorProblem nv(0.4, DiscreteMarginal{{0.2, 0.5, 0.9}, {0.25, 0.25, 0.5}}, 2);
  ReplicateReport slh =
      run_experiment({plain(Scheme::slh, 20, 2, 10), 1000, SeedSpec{900, {}}, 4}, nv);
  ReplicateReport ilh =
      run_experiment({plain(Scheme::ilh, 20, 2, 10), 1000, SeedSpec{901, {}}, 4}, nv);
  REQUIRE(slh.sd > 0.0);
  const double ratio = slh.sd * slh.sd / (ilh.sd * ilh.sd);
  REQUIRE(ratio > 0.7);
  REQUIRE(ratio < 1.4);
}

TEST_CASE("summary statistics recompute from the replicate rows") {
  ExperimentConfig config{plain(Scheme::slh, 4, 1, 3), 50, SeedSpec{1000, {}}, 1};
  ReplicateReport rep = run_experiment(config, NewsvendorProblem(0.4));
  std::vector<double> bounds;
  for (const auto& row : rep.batch_values) {
    double total = 0.0;
    for (double v : row) total += v;
    bounds.push_back(total / static_cast<double>(row.size()));
  }
  REQUIRE(bounds == rep.lower_bounds);
  double mean = 0.0;
  for (double v : bounds) mean += v;
  mean /= static_cast<double>(bounds.size());
  REQUIRE_THAT(rep.mean, Catch::Matchers::WithinAbs(mean, 1e-15));
  double ss = 0.0;
  for (double v : bounds) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(bounds.size()) - 1.0));
  REQUIRE_THAT(rep.sd, Catch::Matchers::WithinRel(sd, 1e-12));
  REQUIRE_THAT(rep.se, Catch::Matchers::WithinRel(sd / std::sqrt(50.0), 1e-12));
}

TEST_CASE("report files round-trip and catch tampering") {
  ExperimentConfig config{backed(Scheme::spolh, "bush:s=4", 1, 3), 20, SeedSpec{1100, {5}}, 1};
  ReplicateReport rep = run_experiment(config, NewsvendorProblem(0.4));
  const std::string summary = "/tmp/ndlhs_summary.csv";
  const std::string rows = "/tmp/ndlhs_replicates.csv";
  write_summary_csv(rep, summary);
  write_replicates_csv(rep, rows);
  ReplicateReport back = read_report(summary, rows);
  REQUIRE(back.scheme == Scheme::spolh);
  REQUIRE(back.n == rep.n);
  REQUIRE(back.t == rep.t);
  REQUIRE(back.m == rep.m);
  REQUIRE(back.replicates == rep.replicates);
  REQUIRE(back.oa == "bush:s=4");
  REQUIRE(back.base_batches == 4);
  REQUIRE(back.seed.master_seed == 1100);
  REQUIRE(back.seed.stream_path == std::vector<std::uint32_t>{5});
  REQUIRE(back.lower_bounds == rep.lower_bounds);
  REQUIRE(back.batch_values == rep.batch_values);
  REQUIRE(back.mean == rep.mean);
  REQUIRE(back.sd == rep.sd);

  ReplicateReport nudged = rep;
  nudged.mean += 1e-6;
  write_summary_csv(nudged, summary);
  REQUIRE_THROWS_AS(read_report(summary, rows), io_error);
}
