#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "config.hpp"
#include "gin/errors.hpp"
#include "runner.hpp"

using namespace gin::cli;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_config(const std::string& body, const char* name) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("minimal config file gets defaults") {
  const auto p = write_temp_config(
      "# comment\n"
      "experiment = diag-distribution\n"
      "n = 32\n"
      "trials = 10\n"
      "seed = 7\n",
      "gin_cfg_minimal.cfg");
  const ExperimentConfig c = parse_config(p.string(), {});
  CHECK(c.experiment == Experiment::diag_distribution);
  CHECK(c.n == 32);
  CHECK(c.trials == 10);
  CHECK(c.seed == 7);
  CHECK_FALSE(c.seed_from_entropy);
  CHECK(c.ensemble == gin::EnsembleKind::complex_gaussian);  // default
  CHECK(c.window_c == doctest::Approx(0.3));            // default
}

TEST_CASE("unknown keys are rejected by name") {
  const auto p = write_temp_config("experiment = verify\nbananas = 7\n", "gin_cfg_bad.cfg");
  try {
    parse_config(p.string(), {});
    FAIL("expected ConfigInvalid");
  } catch (const gin::ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("bananas") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("flags override file values") {
  const auto p = write_temp_config(
      "experiment = verify\nn = 10\ntrials = 5\nseed = 1\n", "gin_cfg_override.cfg");
  const ExperimentConfig c = parse_config(p.string(), {{"seed", "7"}, {"n", "20"}});
  CHECK(c.seed == 7);
  CHECK(c.n == 20);
  CHECK(c.trials == 5);
}

TEST_CASE("invalid values fail with the offending key") {
  CHECK_THROWS_AS(config_from_overrides({{"trials", "0"}}), gin::ConfigInvalid);
  CHECK_THROWS_AS(config_from_overrides({{"n", "-3"}}), gin::ConfigInvalid);
  CHECK_THROWS_AS(config_from_overrides({{"n", "abc"}}), gin::ConfigInvalid);
  CHECK_THROWS_AS(config_from_overrides({{"experiment", "nope"}}), gin::ConfigInvalid);
  CHECK_THROWS_AS(config_from_overrides({{"dt", "-1"}}), gin::ConfigInvalid);
}

TEST_CASE("missing seed falls back to entropy but is recorded") {
  const ExperimentConfig c = config_from_overrides({{"experiment", "verify"}});
  CHECK(c.seed_from_entropy);
}

TEST_CASE("config echo reproduces every knob") {
  ExperimentConfig c = config_from_overrides({{"experiment", "angles"}, {"seed", "12"}});
  const std::string text = config_to_text(c);
  CHECK(text.find("experiment = angles") != std::string::npos);
  CHECK(text.find("seed = 12") != std::string::npos);
  CHECK(text.find("omega_lo") != std::string::npos);
}

TEST_CASE("verify experiment runs end to end") {
  const fs::path out = fs::temp_directory_path() / "gin_run_verify";
  fs::remove_all(out);
  const ExperimentConfig c = config_from_overrides(
      {{"experiment", "verify"}, {"seed", "1"}, {"out", out.string()}});
  CHECK(run(c) == kExitPass);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "verify_report.json"));
  const auto manifest = load_json(out / "manifest.json");
  CHECK(manifest["status"] == "pass");
  CHECK(manifest["seed"] == 1);
}

TEST_CASE("formulas experiment writes the requested grid") {
  const fs::path out = fs::temp_directory_path() / "gin_run_formulas";
  fs::remove_all(out);
  const ExperimentConfig c = config_from_overrides({{"experiment", "formulas"},
                                                    {"function", "inv_gamma2_cdf"},
                                                    {"grid_lo", "0.1"},
                                                    {"grid_hi", "5"},
                                                    {"grid_points", "17"},
                                                    {"seed", "1"},
                                                    {"out", out.string()}});
  CHECK(run(c) == kExitPass);
  std::ifstream csv(out / "formulas.csv");
  REQUIRE(csv.good());
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 18);  // header + 17 grid points
}

TEST_CASE("runs are reproducible and worker-count independent") {
  auto run_once = [](int workers, const char* tag) {
    const fs::path out = fs::temp_directory_path() / tag;
    fs::remove_all(out);
    const ExperimentConfig c = config_from_overrides({{"experiment", "diag-distribution"},
                                                      {"n", "16"},
                                                      {"trials", "400"},
                                                      {"seed", "99"},
                                                      {"workers", std::to_string(workers)},
                                                      {"out", out.string()}});
    REQUIRE(run(c) == kExitPass);
    return load_json(out / "summary.json");
  };
  const auto s1 = run_once(1, "gin_repro_w1");
  const auto s2 = run_once(2, "gin_repro_w2");
  const auto s1b = run_once(1, "gin_repro_w1b");
  CHECK(s1["median"] == s1b["median"]);
  CHECK(std::abs(s1["median"].get<double>() - s2["median"].get<double>()) < 1e-12);
  CHECK(std::abs(s1["ks"][0]["distance"].get<double>() -
                 s2["ks"][0]["distance"].get<double>()) < 1e-12);
}

TEST_CASE("angles experiment produces its csv schema") {
  const fs::path out = fs::temp_directory_path() / "gin_run_angles";
  fs::remove_all(out);
  const ExperimentConfig c = config_from_overrides({{"experiment", "angles"},
                                                    {"n", "40"},
                                                    {"trials", "40"},
                                                    {"seed", "5"},
                                                    {"workers", "2"},
                                                    {"out", out.string()}});
  const int code = run(c);
  CHECK((code == kExitPass || code == kExitAssertionFailed));
  std::ifstream csv(out / "angles.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "omega,n,ks,pass");
}
