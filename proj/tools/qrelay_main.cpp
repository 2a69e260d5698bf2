// qrelay <command> --config <path> [--seed N] [--out DIR]
// qrelay report --manifest <path>
//
// Exit status: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qrelay/errors.hpp"
#include "qrelay/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private polar coding over a relay channel with superactivation"};
  app.set_version_flag("--version", qrelay::software_version());
  app.require_subcommand(1);

  const char* commands[] = {"polarize", "sets", "capacity", "relay-sim", "superactivate", "sweep"};
  const char* blurbs[] = {
      "Bhattacharyya parameters and good/bad sets of a polarized channel",
      "amplitude/phase index partition and rate expressions",
      "single-use capacities of a qubit channel",
      "Monte Carlo model of the probabilistic relay encoder",
      "coherent information of the flagged switch channel at one p",
      "superactivation sweep over p = 0.01 .. 0.99",
  };
  RunArgs args;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i], blurbs[i]);
    sub->add_option("--config", args.config, "JSON experiment config")->required();
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--out", args.out, "override the output directory");
  }
  std::string manifest_path;
  auto* report = app.add_subcommand("report", "print the summary table of a finished run");
  report->add_option("--manifest", manifest_path, "manifest.json written by a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (report->parsed()) {
      std::cout << qrelay::render_report(qrelay::load_manifest(manifest_path));
      return 0;
    }
    const auto* sub = app.get_subcommands().front();
    qrelay::ConfigOverrides overrides;
    overrides.command = qrelay::parse_command(sub->get_name());
    overrides.seed = args.seed;
    overrides.output_dir = args.out;
    const qrelay::ExperimentConfig config = qrelay::load_config(args.config, overrides);
    std::cout << qrelay::render_report(qrelay::run(config));
    return 0;
  } catch (const qrelay::ConfigError& e) {
    std::cerr << "qrelay: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qrelay: " << e.what() << '\n';
    return kExitRuntime;
  }
}
