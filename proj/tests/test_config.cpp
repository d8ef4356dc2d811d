#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lvp/config.hpp"
#include "lvp/pipeline.hpp"

using namespace lvp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lvp_test_" + name);
  fs::remove_all(p);
  return p;
}

// Small exa1 run description for pipeline tests.
RunConfig small_exa1(const fs::path& out) {
  RunConfig c = preset("exa1");
  c.domain.n = 96;
  c.t = {0.1};
  c.n_paths = 2000;
  c.out_dir = out.string();
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

}  // namespace

TEST(Presets, AllFourBuildModels) {
  const auto names = preset_names();
  ASSERT_EQ(names.size(), 4u);
  for (const auto& n : names) {
    RunConfig c = preset(n);
    c.domain.n = 96;
    EXPECT_EQ(c.name, n);
    EXPECT_FALSE(c.artifact_choices.empty()) << n;
    EXPECT_NO_THROW((void)c.build_model()) << n;
  }
  EXPECT_THROW((void)preset("exa4"), ConfigError);
}

TEST(Presets, DyadicExampleRespectsConstraints) {
  const RunConfig c = preset("exa2");
  const double theta = c.measure.at("theta").get<double>();
  const double upsilon = c.measure.at("upsilon").get<double>();
  EXPECT_GT(theta, 0.0);
  EXPECT_LT(theta, 2.0 * upsilon);
  // Perturbation exponent below the index theta / upsilon.
  EXPECT_LT(c.perturbation.at("envelope_eps").get<double>(), theta / upsilon);
  EXPECT_EQ(c.example_bound, ExampleBound::dyadic);
}

TEST(Presets, AppendixPerturbationEqualsEnvelope) {
  const PerturbationSpec p = preset("appendixB").build_perturbation();
  for (double x : {0.0, 1.3})
    for (double u : {0.1, 0.7, 3.0}) EXPECT_DOUBLE_EQ(p.m(x, u), std::min(1.0, u * u));
}

TEST(RunConfigJson, RoundTripIsExact) {
  for (const auto& n : preset_names()) {
    const json j = preset(n).to_json();
    EXPECT_EQ(RunConfig::from_json(j).to_json(), j) << n;
  }
}

TEST(RunConfigJson, RejectsInvalidFields) {
  json j = preset("exa1").to_json();
  j["t"] = {0.5, 1.5};
  EXPECT_THROW((void)RunConfig::from_json(j), ConfigError);
  j = preset("exa1").to_json();
  j["stages"] = {"kernel", "plot"};
  EXPECT_THROW((void)RunConfig::from_json(j), ConfigError);
  j = preset("exa1").to_json();
  j.erase("measure");
  EXPECT_THROW((void)RunConfig::from_json(j), ConfigError);
  j = preset("exa1").to_json();
  j["freeze"] = "y";
  EXPECT_THROW((void)RunConfig::from_json(j), ConfigError);
  j = preset("exa1").to_json();
  j["measure"]["kind"] = "gamma";
  EXPECT_THROW((void)RunConfig::from_json(j).build_measure(), ConfigError);
  EXPECT_THROW((void)RunConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST(RunConfigJson, ReadsFile) {
  const fs::path dir = scratch("file");
  fs::create_directories(dir);
  const json j = preset("exa2").to_json();
  std::ofstream(dir / "c.json") << j.dump(2);
  EXPECT_EQ(RunConfig::from_file((dir / "c.json").string()).to_json(), j);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW((void)RunConfig::from_file((dir / "bad.json").string()), ConfigError);
}

TEST(Stages, ResolveToChainPrefix) {
  RunConfig c = preset("exa1");
  c.stages = {"parametrix"};
  EXPECT_EQ(c.resolved_stages(), (std::vector<std::string>{"exponent", "kernel", "parametrix"}));
  EXPECT_TRUE(c.runs("kernel"));
  EXPECT_FALSE(c.runs("validate"));
  c.stages = {"simulate", "exponent"};
  EXPECT_EQ(c.resolved_stages(), stage_chain());
  c.stages = {"exponent"};
  EXPECT_EQ(c.resolved_stages(), (std::vector<std::string>{"exponent"}));
}

TEST(KernelHash, IgnoresOutputSettings) {
  const RunConfig a = preset("exa1");
  RunConfig b = a;
  b.seed = 42;
  b.out_dir = "elsewhere";
  b.n_paths = 10;
  b.exact = true;
  b.stages = {"validate"};
  EXPECT_EQ(a.kernel_hash(), b.kernel_hash());
  b.domain.n = 480;
  EXPECT_NE(a.kernel_hash(), b.kernel_hash());
  RunConfig c = a;
  c.t = {0.5};
  EXPECT_NE(a.kernel_hash(), c.kernel_hash());
  EXPECT_NE(a.kernel_hash(), preset("appendixB").kernel_hash());
}

TEST(Pipeline, ExponentStageWritesEffectiveConfig) {
  const fs::path out = scratch("exponent");
  RunConfig c = small_exa1(out);
  c.stages = {"exponent"};
  std::ostringstream log;
  const RunResult r = run(c, log);
  EXPECT_EQ(r.exit_code, exit_pass) << log.str();
  ASSERT_TRUE(fs::exists(out / "effective_config.json"));
  ASSERT_TRUE(fs::exists(out / "exponent.json"));
  EXPECT_FALSE(fs::exists(out / "kernel.json"));
  std::ifstream in(out / "effective_config.json");
  const json eff = json::parse(in);
  EXPECT_EQ(RunConfig::from_json(eff).to_json(), eff);
  EXPECT_EQ(eff.at("domain").at("n").get<int>(), 96);
}

TEST(Pipeline, RefusedModelExitsWithValidationCode) {
  // An atom pair fails the lower-scaling hypothesis.
  const fs::path out = scratch("refused");
  RunConfig c = small_exa1(out);
  c.measure = {{"kind", "atoms"}, {"pairs", {{1.0, 1.0}}}};
  c.stages = {"exponent"};
  std::ostringstream log;
  const RunResult r = run(c, log);
  EXPECT_EQ(r.exit_code, exit_validation);
  EXPECT_TRUE(r.summary.contains("error"));
  EXPECT_TRUE(fs::exists(out / "error.json"));
}

TEST(Pipeline, DivergentSeriesExitsWithNonConvergence) {
  const fs::path out = scratch("diverge");
  RunConfig c = small_exa1(out);
  c.perturbation = json{{"label", "large"},
                        {"terms", json::array({json{{"a", {{"kind", "const"}, {"value", 40.0}}},
                                                    {"k", {{"kind", "cap_power"}, {"eps", 0.5}}}}})},
                        {"envelope_c", 40.0},
                        {"envelope_eps", 0.5}};
  c.series.k_max = 3;
  c.t = {1.0};
  c.stages = {"parametrix"};
  std::ostringstream log;
  const RunResult r = run(c, log);
  EXPECT_EQ(r.exit_code, exit_nonconvergence) << log.str();
}

TEST(Pipeline, CachedKernelsAreReused) {
  const fs::path out = scratch("cache");
  RunConfig c = small_exa1(out);
  c.stages = {"parametrix"};
  std::ostringstream log;
  ASSERT_EQ(run(c, log).exit_code, exit_pass) << log.str();
  c.stages = {"validate"};
  const RunResult r = run(c, log);
  ASSERT_TRUE(r.summary.contains("cache"));
  EXPECT_EQ(r.summary.at("cache").get<std::string>(), c.kernel_hash());
  // A different grid invalidates the cache.
  RunConfig d = c;
  d.domain.n = 192;
  EXPECT_FALSE(run(d, log).summary.contains("cache"));
}

TEST(Pipeline, ExactRerunIsByteIdentical) {
  const fs::path out = scratch("exact");
  RunConfig c = small_exa1(out);
  c.exact = true;
  std::ostringstream log;
  // The coarse grid fails some checks; only the artifacts matter here.
  ASSERT_NE(run(c, log).exit_code, exit_config) << log.str();
  const auto first = snapshot(out);
  for (const char* name : {"samples_t0.1.csv", "p_t0.1.csv", "p_t0.1.bin", "validation.json"})
    ASSERT_TRUE(first.count(name)) << name;
  fs::remove_all(out);
  (void)run(c, log);
  const auto second = snapshot(out);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [name, bytes] : first) {
    ASSERT_TRUE(second.count(name)) << name;
    EXPECT_EQ(bytes, second.at(name)) << name;
  }
}
