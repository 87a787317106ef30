#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ndlhs/designs.hpp"
#include "ndlhs/io.hpp"
#include "ndlhs/oa.hpp"
#include "ndlhs/solh.hpp"

using namespace ndlhs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

bool same_family(const DesignFamily& a, const DesignFamily& b) {
  if (a.scheme != b.scheme || a.t() != b.t() || a.n() != b.n() || a.m() != b.m())
    return false;
  if (a.provenance.master_seed != b.provenance.master_seed) return false;
  if (a.provenance.stream_path != b.provenance.stream_path) return false;
  if (a.oa_tag != b.oa_tag || a.base_batches != b.base_batches) return false;
  for (int r = 0; r < a.t(); ++r) {
    const DesignMatrix& da = a.slices[static_cast<std::size_t>(r)];
    const DesignMatrix& db = b.slices[static_cast<std::size_t>(r)];
    if (da.resolution != db.resolution || da.xi != db.xi) return false;
  }
  return true;
}

const std::string dir = "/tmp/";

}  // namespace

TEST_CASE("orthogonal arrays survive a write and read") {
  OrthogonalArray oa = bose_bush(2, 4, 5);
  const std::string path = dir + "ndlhs_oa.csv";
  write_oa_csv(oa, path);
  OrthogonalArray back = read_oa_csv(path);
  REQUIRE(back.rows == oa.rows);
  REQUIRE(back.cols == oa.cols);
  REQUIRE(back.levels == oa.levels);
  REQUIRE(back.strength == 2);
  REQUIRE(back.index == 2);
  REQUIRE(back.c == oa.c);
  write_oa_csv(back, dir + "ndlhs_oa2.csv");
  REQUIRE(slurp(path) == slurp(dir + "ndlhs_oa2.csv"));
}

TEST_CASE("array files with problems are refused") {
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_missing.csv"), io_error);
  spit(dir + "ndlhs_bad_oa.csv", "# nothing\n");
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_bad_oa.csv"), io_error);
  spit(dir + "ndlhs_bad_oa.csv", "1,2\n1\n");
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_bad_oa.csv"), io_error);
  spit(dir + "ndlhs_bad_oa.csv", "1,0\n2,1\n");
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_bad_oa.csv"), io_error);
  spit(dir + "ndlhs_bad_oa.csv", "1,x\n");
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_bad_oa.csv"), io_error);
  spit(dir + "ndlhs_bad_oa.csv", "1,2\n2,1\n");
  REQUIRE_THROWS_AS(read_oa_csv(dir + "ndlhs_bad_oa.csv", 3), std::invalid_argument);
  REQUIRE_THROWS_AS(write_oa_csv(bush(2, 2), "/nonexistent-dir/x.csv"), io_error);
}

TEST_CASE("a sliced family round-trips with its provenance") {
  DesignFamily fam = gen_slh(5, 3, 4, SeedSpec{987654321, {7, 3}});
  const std::string path = dir + "ndlhs_slh.csv";
  write_design_csv(fam, path);
  DesignFamily back = read_design_csv(path);
  REQUIRE(same_family(fam, back));
  REQUIRE(back.slices[0].resolution == 20);
  REQUIRE(validate_sliced(back).pass());
  write_design_csv(back, dir + "ndlhs_slh2.csv");
  REQUIRE(slurp(path) == slurp(dir + "ndlhs_slh2.csv"));
}

TEST_CASE("independent batches reload at the batch resolution") {
  DesignFamily fam = gen_ilh(6, 2, 3, SeedSpec{5, {}});
  write_design_csv(fam, dir + "ndlhs_ilh.csv");
  DesignFamily back = read_design_csv(dir + "ndlhs_ilh.csv");
  REQUIRE(same_family(fam, back));
  REQUIRE(back.slices[0].resolution == 6);

  DesignFamily mc = gen_monte_carlo(4, 2, 2, SeedSpec{6, {}});
  write_design_csv(mc, dir + "ndlhs_mc.csv");
  REQUIRE(same_family(mc, read_design_csv(dir + "ndlhs_mc.csv")));
}

TEST_CASE("array-backed families keep their tag and base size") {
  DesignFamily solh = gen_solh(bush(4, 3), 2, SeedSpec{11, {}});
  solh.oa_tag = "bush:s=4";
  write_design_csv(solh, dir + "ndlhs_solh.csv");
  DesignFamily back = read_design_csv(dir + "ndlhs_solh.csv");
  REQUIRE(same_family(solh, back));
  REQUIRE(back.oa_tag == "bush:s=4");
  REQUIRE(back.slices[0].resolution == 16);

  DesignFamily spolh = gen_spolh(bush(4, 3), 2, 2, SeedSpec{12, {}});
  spolh.oa_tag = "bush:s=4";
  write_design_csv(spolh, dir + "ndlhs_spolh.csv");
  DesignFamily sback = read_design_csv(dir + "ndlhs_spolh.csv");
  REQUIRE(same_family(spolh, sback));
  REQUIRE(sback.base_batches == 4);
  REQUIRE(sback.t() == 2);
  REQUIRE(sback.slices[0].resolution == 16);

  DesignFamily ind = gen_indbb(2, 4, 2, 5, SeedSpec{13, {}});
  ind.oa_tag = "bosebush:lam=2,s=4";
  write_design_csv(ind, dir + "ndlhs_indbb.csv");
  DesignFamily iback = read_design_csv(dir + "ndlhs_indbb.csv");
  REQUIRE(same_family(ind, iback));
  REQUIRE(iback.slices[0].resolution == 32);
}

TEST_CASE("design rows reload bit for bit") {
  DesignFamily fam = gen_slh(3, 2, 2, SeedSpec{42, {}});
  fam.slices[0].at(0, 0) = 1.0 / 3.0;
  fam.slices[1].at(2, 1) = 1e-17;
  write_design_csv(fam, dir + "ndlhs_bits.csv");
  DesignFamily back = read_design_csv(dir + "ndlhs_bits.csv");
  REQUIRE(back.slices[0].at(0, 0) == 1.0 / 3.0);
  REQUIRE(back.slices[1].at(2, 1) == 1e-17);
}

TEST_CASE("design headers are checked before any rows") {
  DesignFamily fam = gen_slh(2, 1, 2, SeedSpec{1, {}});
  const std::string path = dir + "ndlhs_hdr.csv";
  write_design_csv(fam, path);
  const std::string good = slurp(path);

  for (const char* key : {"scheme=", "n=", "m=", "t=", "seed="}) {
    std::string broken = good;
    const std::size_t at = broken.find(key);
    broken.replace(at, 1, "x");
    spit(path, broken);
    REQUIRE_THROWS_AS(read_design_csv(path), io_error);
  }
  {
    std::string broken = good;
    broken.replace(broken.find("slh"), 3, "xyz");
    spit(path, broken);
    REQUIRE_THROWS_AS(read_design_csv(path), io_error);
  }
  {
    std::string broken = good;
    broken.replace(broken.find("rng=") + 4, 1, "Q");
    spit(path, broken);
    REQUIRE_THROWS_WITH(read_design_csv(path),
                        Catch::Matchers::ContainsSubstring("rng"));
  }
}

TEST_CASE("design rows that disagree with the header are refused") {
  DesignFamily fam = gen_slh(2, 1, 2, SeedSpec{2, {}});
  const std::string path = dir + "ndlhs_rows.csv";
  write_design_csv(fam, path);
  const std::string good = slurp(path);
  auto lines = [&]() {
    std::vector<std::string> out;
    std::istringstream in(good);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
  }();

  spit(path, lines[0] + "\n" + lines[1] + "\n");
  REQUIRE_THROWS_WITH(read_design_csv(path), Catch::Matchers::ContainsSubstring("data rows"));

  spit(path, good + "1,0.5\n");
  REQUIRE_THROWS_AS(read_design_csv(path), io_error);

  {
    std::string swapped = good;
    swapped.replace(swapped.find("\n2,"), 3, "\n9,");
    spit(path, swapped);
    REQUIRE_THROWS_WITH(read_design_csv(path), Catch::Matchers::ContainsSubstring("slice"));
  }
  {
    std::string wide = lines[0] + "\n";
    for (std::size_t i = 1; i < lines.size(); ++i) wide += lines[i] + ",0.25\n";
    spit(path, wide);
    REQUIRE_THROWS_AS(read_design_csv(path), io_error);
  }
  {
    std::string dupes = lines[0] + "\n";
    for (std::size_t i = 1; i < lines.size(); ++i)
      dupes += "1" + lines[i].substr(1) + "\n";
    spit(path, dupes);
    REQUIRE_THROWS_WITH(read_design_csv(path),
                        Catch::Matchers::ContainsSubstring("more than n"));
  }
  spit(path, "# scheme=slh n=2 m=1 t=2 seed=2 rng=splitmix64-path/1\nnot,a,number\n");
  REQUIRE_THROWS_AS(read_design_csv(path), io_error);
  REQUIRE_THROWS_AS(read_design_csv(dir + "ndlhs_missing_design.csv"), io_error);
}

TEST_CASE("fixture arrays parse with their declared shapes") {
  const std::string fx = std::string(NDLHS_FIXTURE_DIR);
  OrthogonalArray left = read_oa_csv(fx + "/table2_left.csv");
  REQUIRE(left.rows == 16);
  REQUIRE(left.cols == 5);
  REQUIRE(left.levels == 4);
  REQUIRE(left.index == 1);
  OrthogonalArray right = read_oa_csv(fx + "/table2_right.csv");
  REQUIRE(right.levels == 2);
  REQUIRE(right.index == 4);
  OrthogonalArray l18 = read_oa_csv(fx + "/oa18_4_3_2.csv");
  REQUIRE(l18.rows == 18);
  REQUIRE(l18.index == 2);
}
