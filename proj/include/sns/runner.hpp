#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sns/coupling.hpp"
#include "sns/ergodic.hpp"

namespace sns {

// Parsed experiment configuration. The JSON schema is strict: unknown keys
// are rejected before any computation runs.
struct RunConfig {
  std::string experiment;
  SimConfig sim;
  std::optional<CoupleConfig> couple;

  // ergodic block
  std::string ergodic_mode = "time-average";
  std::vector<Observable> observables;
  double burn_in_fraction = 0.25;
  std::vector<double> windows;
  std::optional<VorticityField> second_initial;
  int ergodic_replicas = 16;
  std::vector<EventSet> events;
  std::vector<double> t_grid;

  // activation block
  double activation_horizon = 100.0;
  int activation_replicas = 1;
  double activation_burn_in = 0.5;

  // balance block
  int balance_replicas = 0;  // 0 = skip

  // oracle block
  int oracle_pairs = 50;

  std::string raw_text;  // canonical config text, hashed into the manifest

  RunConfig(GridPtr g, NoiseModel n) : sim(std::move(g), std::move(n)) {}
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
};

// Executes the configured experiment, writing CSV/JSON artifacts and a
// manifest into out_dir. Returns 0 on success; errors surface as exceptions
// that the CLI maps onto exit codes.
int run_experiment(const RunConfig& cfg_in, const std::filesystem::path& out_dir,
                   const RunOverrides& overrides = {});

// FNV-1a hash of the canonical config text (recorded in the manifest).
std::uint64_t config_hash(const std::string& text);

}  // namespace sns
