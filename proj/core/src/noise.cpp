#include "stirap/noise.hpp"

#include "stirap/geometry.hpp"
#include "stirap/parallel.hpp"
#include "stirap/protocol.hpp"
#include "stirap/units.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace stirap {

void NoiseConfig::validate() const {
  if (!(s_theta_deg >= 0.0) || !(s_phi_deg >= 0.0)) throw std::invalid_argument("noise amplitudes must be >= 0");
  if (!(bandwidth_mhz >= 0.0)) throw std::invalid_argument("noise bandwidth must be >= 0");
  if (runs < 1) throw std::invalid_argument("ensemble needs at least one run");
  if (photons < 1) throw std::invalid_argument("photon budget must be positive");
}

NoiseTrace ou_generate(double s_deg, double bandwidth_mhz, double grid_ns, std::size_t samples,
                       std::uint64_t seed) {
  if (s_deg < 0.0 || bandwidth_mhz < 0.0 || !(grid_ns > 0.0)) {
    throw std::invalid_argument("invalid OU parameters");
  }
  NoiseTrace trace{grid_ns, std::vector<double>(samples, 0.0), seed};
  if (s_deg == 0.0 || samples == 0) return trace;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = std::exp(-kTwoPi * bandwidth_mhz * 1e-3 * grid_ns);
  const double kick = s_deg * std::sqrt(1.0 - a * a);
  double x = s_deg * normal(rng);
  trace.values[0] = x;
  for (std::size_t k = 1; k < samples; ++k) {
    x = a * x + kick * normal(rng);
    trace.values[k] = x;
  }
  return trace;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, SeedKind kind) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ run);
  return splitmix64(h ^ static_cast<std::uint64_t>(kind));
}

double shot_readout(double p, int photons, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("readout probability outside [0, 1]");
  if (photons < 1) throw std::invalid_argument("photon budget must be positive");
  std::mt19937_64 rng(seed);
  std::binomial_distribution<int> draw(photons, p);
  return static_cast<double>(draw(rng)) / photons;
}

double sampled_projection(double projection, int photons, std::uint64_t seed) {
  const double p = std::clamp(0.5 * (1.0 + projection), 0.0, 1.0);
  return 2.0 * shot_readout(p, photons, seed) - 1.0;
}

std::string_view to_string(EnsembleMode mode) {
  return mode == EnsembleMode::AnalyticPath ? "analytic-path" : "full-lindblad";
}

EnsembleMode parse_ensemble_mode(std::string_view text) {
  if (text == "analytic-path") return EnsembleMode::AnalyticPath;
  if (text == "full-lindblad") return EnsembleMode::FullLindblad;
  throw std::invalid_argument("unknown ensemble mode: " + std::string(text));
}

std::string_view to_string(ReadoutMode mode) { return mode == ReadoutMode::Ideal ? "ideal" : "sampled"; }

ReadoutMode parse_readout_mode(std::string_view text) {
  if (text == "ideal") return ReadoutMode::Ideal;
  if (text == "sampled") return ReadoutMode::Sampled;
  throw std::invalid_argument("unknown readout mode: " + std::string(text));
}

namespace {

Interval sigma_interval(double sigma, int n) {
  if (n < 2) return {0.0, std::numeric_limits<double>::infinity()};
  const boost::math::chi_squared dist(n - 1);
  const double dof = n - 1;
  return {sigma * std::sqrt(dof / boost::math::quantile(dist, 0.975)),
          sigma * std::sqrt(dof / boost::math::quantile(dist, 0.025))};
}

double t_quantile(int n) {
  if (n < 2) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::students_t(n - 1), 0.975);
}

}  // namespace

DistributionStats summarize(std::span<const EnsembleRun> runs) {
  DistributionStats s;
  s.runs = static_cast<int>(runs.size());
  if (runs.empty()) return s;
  const double n = static_cast<double>(runs.size());

  double sx = 0.0;
  double sy = 0.0;
  double vis = 0.0;
  for (const EnsembleRun& r : runs) {
    sx += std::cos(to_radians(r.gamma_deg));
    sy += std::sin(to_radians(r.gamma_deg));
    vis += r.visibility;
  }
  s.mean_deg = to_degrees(std::atan2(sy, sx));
  s.mean_visibility = vis / n;

  double ss = 0.0;
  double vv = 0.0;
  for (const EnsembleRun& r : runs) {
    const double d = wrap_degrees(r.gamma_deg - s.mean_deg);
    ss += d * d;
    vv += (r.visibility - s.mean_visibility) * (r.visibility - s.mean_visibility);
  }
  s.sigma_raw_deg = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.sigma_raw_ci = sigma_interval(s.sigma_raw_deg, s.runs);
  const double t = t_quantile(s.runs);
  const double mean_half = runs.size() > 1 ? t * s.sigma_raw_deg / std::sqrt(n) : 0.0;
  s.mean_ci = {s.mean_deg - mean_half, s.mean_deg + mean_half};
  const double vis_half = runs.size() > 1 ? t * std::sqrt(vv / (n - 1.0)) / std::sqrt(n) : 0.0;
  s.visibility_ci = {s.mean_visibility - vis_half, s.mean_visibility + vis_half};

  s.sigma_deg = s.sigma_raw_deg;
  s.sigma_ci = s.sigma_raw_ci;
  return s;
}

double shot_sigma_deg(double visibility, double phase_deg, int photons) {
  if (!(visibility > 0.0)) return std::numeric_limits<double>::infinity();
  const double a2 = visibility * visibility;
  const double s2 = std::sin(2.0 * to_radians(phase_deg));
  const double var = (1.0 - 0.5 * a2 * s2 * s2) / (photons * a2);
  return to_degrees(std::sqrt(std::max(var, 0.0)));
}

DistributionStats estimate_intrinsic_sigma(const DistributionStats& raw, double sigma_shot_deg, int loops) {
  if (loops < 1) throw std::invalid_argument("loop count must be positive");
  const auto deconvolve = [&](double sigma) {
    return std::sqrt(std::max(sigma * sigma - sigma_shot_deg * sigma_shot_deg, 0.0)) / loops;
  };
  DistributionStats s = raw;
  s.sigma_shot_deg = sigma_shot_deg;
  s.sigma_deg = deconvolve(raw.sigma_raw_deg);
  s.sigma_ci = {deconvolve(raw.sigma_raw_ci.lo), deconvolve(raw.sigma_raw_ci.hi)};
  s.below_shot_noise = raw.sigma_raw_deg < sigma_shot_deg;
  return s;
}

namespace {

ProtocolSchedule ensemble_protocol(const PulseSchedule& noisy, bool echo) {
  return echo ? echo_loops(noisy, 2) : repeated_loops(noisy, 1, LoopSign::Positive);
}

}  // namespace

EnsembleResult monte_carlo_berry(const EnsembleRequest& request) {
  request.noise.validate();
  request.params.validate();
  const PulseSchedule clean = tangerine(request.loop);
  const std::size_t samples = clean.steps() + 1;
  const bool lindblad = request.mode == EnsembleMode::FullLindblad;

  EnsembleResult result;
  PropagationOptions options = request.propagation;
  options.keep_states = false;
  options.record_every_ns = std::max(options.record_every_ns, clean.duration());
  if (lindblad && options.substeps == 0) {
    // Resolve the step once on the noiseless protocol so every run, on any
    // worker, integrates with the same step.
    const Trajectory probe = propagate(prepared_reference_state(), ensemble_protocol(clean, request.echo), request.params, options);
    options.substeps = probe.diagnostics.substeps;
  }
  result.substeps = lindblad ? options.substeps : 0;

  const NoiseConfig& noise = request.noise;
  result.runs.resize(static_cast<std::size_t>(noise.runs));
  parallel_for(result.runs.size(), request.threads, [&](std::size_t i) {
    const std::uint64_t theta_seed = derive_seed(noise.master_seed, i, SeedKind::Theta);
    const std::uint64_t phi_seed = derive_seed(noise.master_seed, i, SeedKind::Phi);
    const NoiseTrace dtheta = ou_generate(noise.s_theta_deg, noise.bandwidth_mhz, clean.dt(), samples, theta_seed);
    const NoiseTrace dphi = ou_generate(noise.s_phi_deg, noise.bandwidth_mhz, clean.dt(), samples, phi_seed);
    const PulseSchedule noisy = inject_noise(clean, dtheta.values, dphi.values);
    const ProtocolSchedule protocol = ensemble_protocol(noisy, request.echo);

    double x = 0.0;
    double y = 0.0;
    if (lindblad) {
      const Trajectory traj = propagate(prepared_reference_state(), protocol, request.params, options);
      const BlochVector b = bloch_of(traj.final_state, kReferencePair);
      x = b.x;
      y = b.y;
    } else {
      const double chi = to_radians(adiabatic_readout_phase(protocol));
      x = std::cos(chi);
      y = std::sin(chi);
    }
    if (request.readout == ReadoutMode::Sampled) {
      x = sampled_projection(x, noise.photons, derive_seed(noise.master_seed, i, SeedKind::ReadoutX));
      y = sampled_projection(y, noise.photons, derive_seed(noise.master_seed, i, SeedKind::ReadoutY));
    }
    EnsembleRun& run = result.runs[i];
    run.run = static_cast<int>(i);
    run.seed = phi_seed;
    run.x = x;
    run.y = y;
    run.gamma_deg = to_degrees(std::atan2(y, x));
    run.visibility = std::hypot(x, y);
  });

  const DistributionStats raw = summarize(result.runs);
  const double shot = request.readout == ReadoutMode::Sampled
                          ? shot_sigma_deg(raw.mean_visibility, raw.mean_deg, noise.photons)
                          : 0.0;
  result.stats = estimate_intrinsic_sigma(raw, shot, request.echo ? 2 : 1);
  return result;
}

void write_ensemble_csv(std::ostream& out, std::span<const EnsembleRun> runs) {
  fmt::print(out, "# units: x, y, visibility dimensionless; gamma in degrees (wrapped to (-180, 180])\n");
  fmt::print(out, "# seed is the phase-noise seed of the run\n");
  fmt::print(out, "run,seed,x,y,gamma_deg,visibility\n");
  for (const EnsembleRun& r : runs) {
    fmt::print(out, "{},{},{:.10g},{:.10g},{:.10g},{:.10g}\n", r.run, r.seed, r.x, r.y, r.gamma_deg, r.visibility);
  }
}

}  // namespace stirap
