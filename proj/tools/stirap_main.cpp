// Command-line driver for the experiment presets.

#include "stirap/config.hpp"
#include "stirap/errors.hpp"
#include "stirap/experiments.hpp"
#include "stirap/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFit = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<int> threads;
};

void add_common(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--config", flags.config, "Experiment config file")->check(CLI::ExistingFile);
  cmd.add_option("--seed", flags.seed, "Master seed");
  cmd.add_option("--out", flags.out, "Output directory");
  cmd.add_option("--mode", flags.mode, "Readout mode")->check(CLI::IsMember({"ideal", "sampled"}));
  cmd.add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
}

stirap::ExperimentConfig build_config(stirap::ExperimentKind kind, const CommonFlags& flags) {
  stirap::ExperimentConfig config = stirap::preset(kind);
  if (!flags.config.empty()) stirap::apply_config_file(config, flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out_dir = *flags.out;
  if (flags.mode) config.readout = stirap::parse_readout_mode(*flags.mode);
  if (flags.threads) config.threads = *flags.threads;
  stirap::validate_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berry-phase STIRAP loops in a four-level Lambda model"};
  app.require_subcommand(1);

  CommonFlags flags;
  for (stirap::ExperimentKind kind : stirap::all_experiments()) {
    CLI::App* cmd = app.add_subcommand(std::string(stirap::to_string(kind)));
    add_common(*cmd, flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const stirap::ExperimentKind kind = stirap::parse_experiment(app.get_subcommands().front()->get_name());
    const stirap::ExperimentConfig config = build_config(kind, flags);
    const stirap::ExperimentReport report = stirap::run_experiment(config);
    for (const auto& path : stirap::write_report(report, config.out_dir)) std::cout << path.string() << '\n';
    return kExitOk;
  } catch (const stirap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const stirap::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const stirap::FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitFit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
