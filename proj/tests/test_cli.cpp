#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "manifest.hpp"
#include "sensikit/kernels.hpp"

namespace fs = std::filesystem;
using sensikit::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sensikit_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sensikit");
  return run(args);
}

}  // namespace

TEST_CASE("sha256 of a known string") {
  CHECK(sensikit::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("estimate writes one row per group and kind") {
  const auto dir = scratch("estimate");
  REQUIRE(cli({"estimate", "--model", "ishigami", "--strategy", "ia", "--n", "64", "--sampler", "lhs", "--seed", "1",
               "--out-dir", dir.string()}) == 0);
  const auto rows = lines(slurp(dir / "estimates.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "group,kind,strategy,estimate,asym_variance,n,model_calls");
  CHECK(split(rows[1])[2] == "IA");
  CHECK(split(rows[1])[6] == "512");

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "estimate");
  CHECK(manifest["master_seed"] == 1);
  CHECK(manifest["outputs"][0]["sha256"] == sensikit::cli::sha256_hex(slurp(dir / "estimates.csv")));
}

TEST_CASE("estimate on the g-function reports the call budget") {
  const auto dir = scratch("gfun");
  REQUIRE(cli({"estimate", "--model", "gfunction", "--strategy", "current", "--n", "16384", "--out-dir",
               dir.string()}) == 0);
  const auto rows = lines(slurp(dir / "estimates.csv"));
  REQUIRE(rows.size() == 21);
  CHECK(split(rows[1])[6] == std::to_string(16384 * 12));
}

TEST_CASE("additive model gives equal first and total IA estimates") {
  const auto dir = scratch("additive");
  REQUIRE(cli({"estimate", "--model", "additive", "--params", "coeffs=1,0", "--strategy", "ia", "--out-dir",
               dir.string()}) == 0);
  const auto rows = lines(slurp(dir / "estimates.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(split(rows[1])[3] == split(rows[2])[3]);
  CHECK(split(rows[3])[3] == split(rows[4])[3]);
  CHECK(std::stod(split(rows[1])[3]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(cli({"estimate", "--n", "1", "--out-dir", dir.string()}) == 2);
  CHECK(cli({"estimate", "--model", "nope", "--out-dir", dir.string()}) == 2);
  CHECK(cli({"estimate", "--groups", "4", "--out-dir", dir.string()}) == 2);
  CHECK(cli({"estimate", "--bogus"}) == 2);
  CHECK(cli({"analytic", "--model", "gfunction", "--params", "a=0,-1", "--out-dir", dir.string()}) == 2);
  CHECK(cli({"estimate", "--model", "additive", "--params", "coeffs=0,0", "--out-dir", dir.string()}) == 3);
  CHECK(cli({"--help"}) == 0);
}

TEST_CASE("analytic tables") {
  const auto dir = scratch("analytic");
  REQUIRE(cli({"analytic", "--model", "additive", "--params", "coeffs=3,4", "--out-dir", dir.string()}) == 0);
  const auto rows = lines(slurp(dir / "analytic.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "group,S,ST,V");
  CHECK(std::stod(split(rows[1])[1]) == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(std::stod(split(rows[2])[2]) == doctest::Approx(0.64).epsilon(1e-15));

  REQUIRE(cli({"analytic", "--model", "ishigami", "--groups", "1,3", "--out-dir", dir.string()}) == 0);
  CHECK(lines(slurp(dir / "analytic.csv"))[1].rfind("1;3,", 0) == 0);
}

TEST_CASE("replicate outputs, single replicate and shift study") {
  const auto dir = scratch("replicate");
  REQUIRE(cli({"replicate", "--model", "ishigami", "--n", "32", "--replicates", "1", "--threads", "1", "--out-dir",
               dir.string()}) == 0);
  const auto rep = lines(slurp(dir / "replicates.csv"));
  CHECK(rep.size() == 1 + 2 * 6);
  const auto sum = lines(slurp(dir / "summary.csv"));
  REQUIRE(sum.size() == 1 + 12);
  CHECK(split(sum[1])[7].empty());  // no variance from one replicate

  const auto shift_dir = scratch("shift");
  REQUIRE(cli({"replicate", "--n", "32", "--replicates", "3", "--f0-offsets", "0,100", "--budget-matched", "--out-dir",
               shift_dir.string()}) == 0);
  CHECK(lines(slurp(shift_dir / "shift.csv")).size() == 1 + 2 * 3 * 6);
  CHECK(fs::exists(shift_dir / "shift_summary.csv"));
}

TEST_CASE("variance-compare minimal run") {
  const auto dir = scratch("compare");
  REQUIRE(cli({"variance-compare", "--model", "gfunction", "--n", "64", "--replicates", "2", "--budget-matched",
               "--out-dir", dir.string()}) == 0);
  const auto scatter = lines(slurp(dir / "variance_scatter.csv"));
  CHECK(scatter[0] == "group,ST_analytic,tau2_sj_plugin,tau2_ia_plugin,replicate");
  CHECK(scatter.size() == 1 + 10 * 2);
  CHECK(fs::exists(dir / "variance_summary.csv"));
}

TEST_CASE("config file, flag precedence and manifest replay") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"model": "ishigami", "n": 16, "replicates": 3, "seed": 5, "strategy": "ia", "groups": [[1, 3], "2"]})";
  }
  const auto out1 = dir / "a";
  REQUIRE(cli({"replicate", "--config", (dir / "cfg.json").string(), "--seed", "9", "--out-dir", out1.string()}) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 9);
  CHECK(manifest["config"]["n"] == 16);
  CHECK(manifest["config"]["groups"] == nlohmann::json::parse("[[1,3],[2]]"));
  CHECK(lines(slurp(out1 / "replicates.csv")).size() == 1 + 3 * 2 * 2);

  // Re-running from the manifest alone reproduces every digest.
  const auto out2 = dir / "b";
  REQUIRE(cli({"replicate", "--config", (out1 / "manifest.json").string(), "--out-dir", out2.string()}) == 0);
  const auto replay = nlohmann::json::parse(slurp(out2 / "manifest.json"));
  CHECK(replay["outputs"] == manifest["outputs"]);

  std::ofstream bad(dir / "bad.json");
  bad << R"({"n": 16, "colour": "red"})";
  bad.close();
  CHECK(cli({"estimate", "--config", (dir / "bad.json").string()}) == 2);
}

TEST_CASE("seed falls back to the environment") {
  const auto dir = scratch("env");
  ::setenv("SENSIKIT_SEED", "4242", 1);
  REQUIRE(cli({"analytic", "--out-dir", dir.string()}) == 0);
  ::unsetenv("SENSIKIT_SEED");
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["master_seed"] == 4242);
}

TEST_CASE("outputs do not depend on the kernel ISA") {
  using namespace sensikit::kernels;
  if (!isa_supported(Isa::avx2)) return;
  const Isa before = active_isa();
  std::string text[2];
  int i = 0;
  for (const Isa isa : {Isa::scalar, Isa::avx2}) {
    set_active_isa(isa);
    const auto dir = scratch(std::string("isa_") + std::string(to_string(isa)));
    REQUIRE(cli({"replicate", "--model", "gfunction", "--n", "300", "--replicates", "3", "--out-dir", dir.string()}) == 0);
    text[i++] = slurp(dir / "replicates.csv");
  }
  set_active_isa(before);
  CHECK(text[0] == text[1]);
}
