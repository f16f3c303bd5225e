#pragma once

#include "stirap/integrator.hpp"
#include "stirap/lambda_model.hpp"
#include "stirap/noise.hpp"
#include "stirap/pulse.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stirap {

enum class ExperimentKind {
  Trajectory,
  PlCompare,
  BerrySweep,
  StarkSweep,
  VisibilityMap,
  NoiseRobustness,
  ScheduleDump,
};

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError for unknown names.
ExperimentKind parse_experiment(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();

struct ScheduleConfig {
  LoopSpec loop;
  int loops = 1;
  LoopSign sign = LoopSign::Positive;
  bool echo = false;
};

struct SweepConfig {
  std::vector<double> delta_mhz;
  std::vector<double> tau_ns;
  std::vector<double> rabi_mhz;
  std::vector<double> wedge_deg;
  std::vector<double> s_phi_deg;
  std::vector<double> s_theta_deg;
  std::vector<int> loops;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Trajectory;
  LambdaParams lambda;
  bool dissipation = true;
  ScheduleConfig schedule;
  NoiseConfig noise;
  EnsembleMode ensemble_mode = EnsembleMode::AnalyticPath;
  ReadoutMode readout = ReadoutMode::Ideal;
  PropagationOptions integration;
  SweepConfig sweep;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  /// Lambda parameters with dissipation applied or removed.
  LambdaParams effective_params() const;
};

/// Defaults for each experiment.
ExperimentConfig preset(ExperimentKind kind);

/// Applies INI-style text: top-level keys, then [section] blocks whose keys
/// are addressed as section.key. Unknown keys, malformed values, a mismatched
/// `experiment` key and values outside module invariants throw ConfigError.
void apply_config_text(ExperimentConfig& config, std::string_view text);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Checks module invariants and the sweep axes required by the experiment.
/// Throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// Every recognized key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

}  // namespace stirap
