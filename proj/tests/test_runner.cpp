#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sns/runner.hpp"

using namespace sns;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("sns_test_" + tag);
  fs::remove_all(p);
  return p;
}

const char* kSimulateConfig = R"({
  "experiment": "simulate",
  "grid": {"cutoff": 4},
  "sim": {
    "nu": 1.0, "dt": 0.01, "horizon": 1.0, "record_every": 5, "seed": 7,
    "initial": {"type": "modes", "entries": [[1, 0, 1.0], [0, 1, 0.5]]},
    "tracked_modes": [[1, 0]]
  },
  "noise": {"variant": "additive_diagonal", "a": 0.45, "sigma0": 0.3}
})";

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("config hash is the FNV-1a reference value") {
  CHECK(config_hash("") == 0xcbf29ce484222325ULL);
  CHECK(config_hash("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(config_hash("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("unknown keys are rejected everywhere") {
  CHECK_THROWS_AS(parse_config(R"({"experiment":"simulate","grid":{"cutoff":4},"junk":1})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"experiment":"simulate","grid":{"cutoff":4,"extra":2}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"experiment":"simulate","grid":{"cutoff":4},"sim":{"bogus":1}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"experiment":"simulate","grid":{"cutoff":4},"noise":{"variant":"nope"}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid":{"cutoff":4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"dance","grid":{"cutoff":4}})"),
                  ConfigError);
}

TEST_CASE("field specs parse into the expected coefficients") {
  RunConfig cfg = parse_config(kSimulateConfig);
  CHECK(cfg.experiment == "simulate");
  CHECK(cfg.sim.grid->cutoff() == 4);
  CHECK(cfg.sim.seed == 7);
  CHECK(cfg.sim.initial.coord(cfg.sim.grid->index_of({1, 0})) == 1.0);
  CHECK(cfg.sim.initial.coord(cfg.sim.grid->index_of({0, 1})) == 0.5);
  CHECK(cfg.sim.tracked_modes == std::vector<int>{cfg.sim.grid->index_of({1, 0})});

  RunConfig rnd = parse_config(
      R"({"experiment":"simulate","grid":{"cutoff":4},
          "sim":{"initial":{"type":"random","amplitude":0.5,"decay":1.0,"seed":3}}})");
  CHECK(norm(rnd.sim.initial, Space::V) > 0.0);
  RunConfig rnd2 = parse_config(
      R"({"experiment":"simulate","grid":{"cutoff":4},
          "sim":{"initial":{"type":"random","amplitude":0.5,"decay":1.0,"seed":3}}})");
  CHECK(rnd.sim.initial.coords() == rnd2.sim.initial.coords());

  CHECK_THROWS_AS(parse_config(
                      R"({"experiment":"simulate","grid":{"cutoff":4},
                          "sim":{"initial":{"type":"modes","entries":[[9,9,1.0]]}}})"),
                  ConfigError);
}

TEST_CASE("run_experiment writes the artifacts and a manifest") {
  const fs::path out = temp_dir("simulate");
  RunConfig cfg = parse_config(kSimulateConfig);
  CHECK(run_experiment(cfg, out) == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "manifest.json"));
  const std::string manifest = slurp(out / "manifest.json");
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("seed and replica overrides take effect") {
  const fs::path out_a = temp_dir("ov_a"), out_b = temp_dir("ov_b");
  RunConfig cfg = parse_config(kSimulateConfig);
  RunOverrides over;
  over.seed = 99;
  run_experiment(cfg, out_a, over);
  run_experiment(cfg, out_b);
  CHECK(slurp(out_a / "trajectory.csv") != slurp(out_b / "trajectory.csv"));
  CHECK(slurp(out_a / "manifest.json").find("\"seed\": 99") != std::string::npos);
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path out_a = temp_dir("det_a"), out_b = temp_dir("det_b");
  RunConfig cfg = parse_config(kSimulateConfig);
  run_experiment(cfg, out_a);
  run_experiment(cfg, out_b);
  CHECK(slurp(out_a / "trajectory.csv") == slurp(out_b / "trajectory.csv"));
  CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("oracle experiment reports a tiny error") {
  const fs::path out = temp_dir("oracle");
  RunConfig cfg = parse_config(
      R"({"experiment":"oracle","grid":{"cutoff":4},"oracle":{"pairs":3}})");
  CHECK(run_experiment(cfg, out) == 0);
  const std::string summary = slurp(out / "oracle.json");
  CHECK(summary.find("max_relative_error") != std::string::npos);
  fs::remove_all(out);

  RunConfig big = parse_config(
      R"({"experiment":"oracle","grid":{"cutoff":9},"oracle":{"pairs":1}})");
  CHECK_THROWS_AS(run_experiment(big, temp_dir("oracle_big")), ConfigError);
}

TEST_CASE("validate-noise on the multiplicative family") {
  const fs::path out = temp_dir("vnoise");
  RunConfig cfg = parse_config(
      R"({"experiment":"validate-noise","grid":{"cutoff":4},
          "noise":{"variant":"multiplicative_lowmode","modes":24}})");
  CHECK(run_experiment(cfg, out) == 0);
  const std::string rep = slurp(out / "noise_report.json");
  CHECK(rep.find("\"C1\"") != std::string::npos);
  CHECK(rep.find("a3_residual") != std::string::npos);
  fs::remove_all(out);
}

TEST_SUITE_END();
