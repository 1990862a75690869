#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli/cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = bet::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(BET_TEST_DATA_DIR) + "/" + name; }

// The report minus its timing line.
std::string stable(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"wall_time_s\"") == std::string::npos) out += line + "\n";
  return out;
}

class SeedEnvironment : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("BET_SEED"); }
};

struct GoldenCase {
  const char* name;
  std::vector<std::string> args;
};

void PrintTo(const GoldenCase& c, std::ostream* os) { *os << c.name; }

class Golden : public SeedEnvironment, public ::testing::WithParamInterface<GoldenCase> {};

TEST_P(Golden, MatchesRecordedReport) {
  const auto& gc = GetParam();
  const auto r = run(gc.args);
  const fs::path path = fs::path(BET_GOLDEN_DIR) / (std::string(gc.name) + ".json");
  if (std::getenv("BET_UPDATE_GOLDEN")) {
    std::ofstream(path) << stable(r.out);
    GTEST_SKIP() << "golden updated";
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden " << path;
  std::stringstream expected;
  expected << in.rdbuf();
  EXPECT_EQ(stable(r.out), expected.str());
  EXPECT_TRUE(json::accept(r.out));
}

INSTANTIATE_TEST_SUITE_P(
    CatalogCommands, Golden,
    ::testing::Values(
        GoldenCase{"tensor_gauss1", {"tensor", "--space", "catalog:gauss1", "--point", "0.7", "--q", "inf"}},
        GoldenCase{"tensor_sphere_q2", {"tensor", "--space", "catalog:sphere2", "--point", "1.0,0.5", "--q", "2"}},
        GoldenCase{"bound_cosq", {"bound", "--space", "catalog:cosq_interval(2)", "--q", "2", "--r", "2"}},
        GoldenCase{"bochner_weighted_torus",
                   {"bochner", "--space", "catalog:weighted_torus", "--forms", "4", "--r", "-1", "--order", "24"}},
        GoldenCase{"warp_check_weighted_torus", {"warp-check", "--space", "catalog:weighted_torus", "--q", "2", "--samples", "3"}},
        GoldenCase{"submersion_s3", {"submersion", "--file", "catalog:s3_as_submersion", "--mode", "q", "--r", "2"}},
        GoldenCase{"probe_gauss2", {"probe", "--space", "catalog:gauss2", "--point", "0.3,0", "--dir", "1,0"}},
        GoldenCase{"bg_cosq", {"bg", "--space", "catalog:cosq_interval(2)", "--q", "2", "--r", "2", "--center", "0",
                               "--u1", "0.5", "--u2", "1.0"}},
        GoldenCase{"myers_cosq", {"myers", "--space", "catalog:cosq_interval(2)", "--q", "2", "--r", "2"}},
        GoldenCase{"catalog_list", {"catalog", "list"}}),
    [](const auto& info) { return std::string(info.param.name); });

TEST_F(SeedEnvironment, TensorExample) {
  const auto r = run({"tensor", "--space", "catalog:gauss1", "--point", "0.7", "--q", "inf"});
  EXPECT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["ric_be"][0][0].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(j["command"], "tensor");
  EXPECT_EQ(j["seed"], 42);
  EXPECT_TRUE(j.contains("wall_time_s"));
}

TEST_F(SeedEnvironment, MyersExample) {
  const auto r = run({"myers", "--space", "catalog:cosq_interval(2)", "--q", "2", "--r", "2"});
  EXPECT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["bound"].get<double>(), 3.14159265, 1e-8);
  EXPECT_TRUE(j["results"]["holds"].get<bool>());
}

TEST_F(SeedEnvironment, EqualityTube) {
  const fs::path emit = fs::temp_directory_path() / "bet_cli_emit";
  fs::remove_all(emit);
  const auto r = run({"tube", "--profiles", data("equality_manifest.json"), "--window", "1,2,3,4", "--r", "1", "--c",
                      "0", "--emit-profiles", emit.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["results"]["subtube"]["selected"].empty());
  EXPECT_TRUE(j["passed"].get<bool>());
  std::ifstream csv(emit / "segment_0.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "u,a,ahat");
}

TEST_F(SeedEnvironment, TwoSegmentTube) {
  const auto r = run({"tube", "--profiles", data("two_segment_manifest.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["results"]["subtube"]["selected"].size(), 1u);
  EXPECT_EQ(j["results"]["subtube"]["selected"][0], 0);
}

TEST_F(SeedEnvironment, SpaceFileInput) {
  const auto r = run({"bound", "--space", data("sphere.json"), "--q", "inf", "--r", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto s = run({"submersion", "--file", data("s3_submersion.json"), "--mode", "q", "--r", "2"});
  EXPECT_EQ(s.code, 0) << s.err;
}

TEST_F(SeedEnvironment, ExitCodeCheckFailed) {
  // Ric~_4 of the Gaussian drops to 1 at |x| = 1, so r = 2 fails.
  const auto r = run({"bound", "--space", "catalog:gauss1", "--q", "4", "--r", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(json::parse(r.out)["passed"].get<bool>());
}

TEST_F(SeedEnvironment, ExitCodeUsage) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"tensor", "--space", "catalog:gauss1"}).code, 2);
  EXPECT_EQ(run({"tensor", "--space", "catalog:gauss1", "--point", "0.7", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run({"tube", "--profiles", data("equality_manifest.json"), "--space", "catalog:gauss1"}).code, 2);
}

TEST_F(SeedEnvironment, ExitCodeSchema) {
  EXPECT_EQ(run({"tensor", "--space", data("missing_metric.json"), "--point", "0.5"}).code, 3);
  EXPECT_EQ(run({"tensor", "--space", "catalog:nonexistent", "--point", "0.5"}).code, 3);
  EXPECT_EQ(run({"tensor", "--space", data("no_such_file.json"), "--point", "0.5"}).code, 3);
  const auto r = run({"tensor", "--space", "catalog:gauss1", "--point", "0.5,1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.out)["error"]["code"], "DimensionMismatch");
}

TEST_F(SeedEnvironment, ExitCodeHypothesisNotMet) {
  const auto r = run({"tube", "--profiles", data("two_segment_manifest.json"), "--c", "0"});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(json::parse(r.out)["error"]["code"], "HypothesisNotMet");
  EXPECT_EQ(run({"bg", "--space", "catalog:gauss1", "--q", "inf", "--r", "2", "--center", "0", "--u1", "0.5", "--u2",
                 "1"})
                .code,
            4);
  EXPECT_EQ(run({"myers", "--space", "catalog:flat_torus_2", "--q", "0", "--r", "0"}).code, 4);
}

TEST_F(SeedEnvironment, SeedPrecedence) {
  auto seed_of = [](const Outcome& o) { return json::parse(o.out)["seed"].get<std::uint64_t>(); };
  const std::vector<std::string> base = {"bochner", "--space", "catalog:flat_torus_2", "--forms", "2", "--order", "16"};
  EXPECT_EQ(seed_of(run(base)), 42u);
  setenv("BET_SEED", "7", 1);
  const auto env = run(base);
  EXPECT_EQ(seed_of(env), 7u);
  EXPECT_EQ(json::parse(env.out)["provenance"]["seed_source"], "BET_SEED");
  auto with_flag = base;
  with_flag.insert(with_flag.begin(), {"--seed", "9"});
  EXPECT_EQ(seed_of(run(with_flag)), 9u);
  unsetenv("BET_SEED");
}

TEST_F(SeedEnvironment, DeterministicForFixedSeed) {
  const std::vector<std::string> args = {"bochner", "--space", "catalog:lumpy_torus", "--forms", "3", "--order", "16"};
  EXPECT_EQ(stable(run(args).out), stable(run(args).out));
}

TEST_F(SeedEnvironment, CatalogShowIsASpaceFile) {
  const auto r = run({"catalog", "show", "sphere2"});
  EXPECT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["results"]["space_file"]["coordinates"][0], "th");
}

}  // namespace
