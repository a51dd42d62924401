// Command-line front end: every experiment is a subcommand reading one JSON
// config and writing its artifacts plus a manifest into --out.

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sns/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitStatistics = 4;

struct Cli {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::string experiment;
};

int run(const Cli& cli) {
  try {
    sns::RunConfig cfg = sns::load_config(cli.config_path);
    if (cfg.experiment != cli.experiment)
      throw sns::ConfigError("config experiment \"" + cfg.experiment +
                             "\" does not match subcommand \"" + cli.experiment + "\"");
    sns::RunOverrides over;
    over.seed = cli.seed;
    over.replicas = cli.replicas;
    return sns::run_experiment(cfg, cli.out_dir, over);
  } catch (const sns::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const sns::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const sns::StatisticsRefused& e) {
    std::fprintf(stderr, "statistics refused: %s\n", e.what());
    return kExitStatistics;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torusflow: spectral Galerkin simulator for stochastic 2D Navier-Stokes"};
  app.require_subcommand(1);

  Cli cli;
  int exit_code = 0;
  for (const char* name : {"simulate", "stokes", "couple", "ergodic", "activation",
                           "validate-noise", "oracle"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", cli.config_path, "JSON config file")->required();
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option("--seed", cli.seed, "override the config seed");
    sub->add_option("--replicas", cli.replicas, "override replica counts");
    sub->callback([&cli, &exit_code, name] {
      cli.experiment = name;
      exit_code = run(cli);
    });
  }

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
