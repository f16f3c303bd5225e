#pragma once

#include "stirap/integrator.hpp"
#include "stirap/lambda_model.hpp"
#include "stirap/pulse.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace stirap {

struct NoiseConfig {
  double s_theta_deg = 0.0;
  double s_phi_deg = 0.0;
  double bandwidth_mhz = 3.0;
  int runs = 250;
  std::uint64_t master_seed = 1;
  /// Photon budget per projection for sampled readout.
  int photons = 500;

  /// Throws std::invalid_argument on negative amplitudes or bandwidth, or on
  /// fewer than one run or photon.
  void validate() const;
};

struct NoiseTrace {
  double grid_ns = 0.0;  // sample spacing
  std::vector<double> values;  // degrees
  std::uint64_t seed = 0;
};

/// Ornstein-Uhlenbeck samples with stationary standard deviation s and
/// correlation s^2 exp(-2 pi dnu |dt|), by the exact one-step recursion.
/// The first sample is drawn from the stationary distribution.
NoiseTrace ou_generate(double s_deg, double bandwidth_mhz, double grid_ns, std::size_t samples,
                       std::uint64_t seed);

enum class SeedKind : std::uint64_t { Theta = 1, Phi = 2, ReadoutX = 3, ReadoutY = 4, Ensemble = 5 };

/// Per-run seed: splitmix64 finalizer applied to master, run and kind in
/// turn. Frozen; changing it changes every ensemble output.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, SeedKind kind);

/// Fraction of successes in a binomial draw of `photons` trials with
/// probability p.
double shot_readout(double p, int photons, std::uint64_t seed);

/// Projection estimate 2 k / n - 1 for a true projection in [-1, 1].
double sampled_projection(double projection, int photons, std::uint64_t seed);

enum class EnsembleMode { AnalyticPath, FullLindblad };
enum class ReadoutMode { Ideal, Sampled };

std::string_view to_string(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(std::string_view text);
std::string_view to_string(ReadoutMode mode);
ReadoutMode parse_readout_mode(std::string_view text);

struct EnsembleRequest {
  LoopSpec loop;
  /// With echo each run is (+loop, pi pulse, the same noisy loop reversed).
  bool echo = true;
  LambdaParams params;
  NoiseConfig noise;
  EnsembleMode mode = EnsembleMode::AnalyticPath;
  ReadoutMode readout = ReadoutMode::Ideal;
  PropagationOptions propagation;
  int threads = 1;
};

struct EnsembleRun {
  int run = 0;
  std::uint64_t seed = 0;  // phase-noise seed
  double x = 0.0;
  double y = 0.0;
  double gamma_deg = 0.0;  // readout phase, wrapped
  double visibility = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct DistributionStats {
  int runs = 0;
  double mean_deg = 0.0;  // circular mean
  Interval mean_ci;
  double sigma_raw_deg = 0.0;  // includes shot broadening
  Interval sigma_raw_ci;
  double sigma_shot_deg = 0.0;
  double sigma_deg = 0.0;  // intrinsic, per loop
  Interval sigma_ci;
  double mean_visibility = 0.0;
  Interval visibility_ci;
  bool below_shot_noise = false;
};

/// Circular mean, sample standard deviation about it, mean visibility and
/// their 95% intervals. The intrinsic fields are copies of the raw ones.
DistributionStats summarize(std::span<const EnsembleRun> runs);

/// Angular standard deviation in degrees caused by binomial readout of both
/// projections at visibility A and phase xi:
/// sqrt((1 - A^2 sin^2(2 xi) / 2) / (n A^2)).
double shot_sigma_deg(double visibility, double phase_deg, int photons);

/// sigma = sqrt(max(sigma_raw^2 - sigma_shot^2, 0)) / loops, applied to the
/// estimate and to both interval ends. Flags sigma_raw < sigma_shot.
DistributionStats estimate_intrinsic_sigma(const DistributionStats& raw, double sigma_shot_deg, int loops);

struct EnsembleResult {
  std::vector<EnsembleRun> runs;
  DistributionStats stats;
  /// Substeps used by every full-lindblad run (0 for analytic-path).
  int substeps = 0;
};

/// Noisy-path Monte Carlo. Run r draws theta and phi traces seeded by
/// derive_seed(master, r, kind), applies them to one loop, and reads out the
/// phase of |-1_g> relative to |0_g>: from the Berry integral (analytic-path)
/// or from the propagated state prepared in (|0_g> + |-1_g>)/sqrt(2)
/// (full-lindblad). Output does not depend on the thread count.
EnsembleResult monte_carlo_berry(const EnsembleRequest& request);

/// CSV with columns run, seed, x, y, gamma_deg, visibility.
void write_ensemble_csv(std::ostream& out, std::span<const EnsembleRun> runs);

}  // namespace stirap
