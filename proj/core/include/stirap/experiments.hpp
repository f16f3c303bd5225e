#pragma once

#include "stirap/config.hpp"
#include "stirap/fit.hpp"
#include "stirap/integrator.hpp"
#include "stirap/noise.hpp"
#include "stirap/report.hpp"

#include <string>
#include <vector>

namespace stirap {

/// Worst-case state diagnostics over every propagation of an experiment.
struct InvariantSummary {
  int propagations = 0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  int max_substeps = 0;

  void add(const PropagationDiagnostics& d);
  nlohmann::json to_json() const;
};

struct TrajectoryFeatures {
  double final_norm = 0.0;
  double equator_out_ns = 0.0;  // schedule theta crosses pi/2
  double equator_in_ns = 0.0;
  double outbound_dip_ns = 0.0;  // minimum of |b| on the outbound half
  double outbound_dip_norm = 0.0;
  double pole_norm = 0.0;  // |b| at the |+1_g> pole
  double steepest_out_ns = 0.0;  // fastest decrease of |b| per half
  double steepest_in_ns = 0.0;
  bool dips_at_equator = false;
  bool pole_revival = false;
};

struct LongitudeRow {
  double wedge_deg = 0.0;
  double azimuth_deg = 0.0;  // Bloch azimuth at the inbound equator crossing
  double expected_deg = 0.0;  // dark-state azimuth, wedge + 180
  double norm = 0.0;
};

struct TrajectoryExperiment {
  Trajectory trajectory;
  TrajectoryFeatures features;
  std::vector<LongitudeRow> longitudes;
  InvariantSummary invariants;
  ExperimentReport report;
};

struct PlComparison {
  Trajectory stirap;
  Trajectory cpt;
  double stirap_mean_rate = 0.0;  // photons / ns over the loop
  double cpt_peak_rate = 0.0;
  double ratio = 0.0;  // cpt_peak_rate / stirap_mean_rate
  double stirap_peak_out_ns = 0.0;
  double stirap_peak_in_ns = 0.0;
  double equator_out_ns = 0.0;  // Bloch z of the STIRAP run crosses 0
  double equator_in_ns = 0.0;
  InvariantSummary invariants;
  ExperimentReport report;
};

/// Readout after one protocol of a Berry sweep. `pattern` is "+", "-",
/// "+-" (one loop each way, no echo) or "echo".
struct BerryResult {
  double wedge_deg = 0.0;
  std::string pattern;
  int loops = 1;
  double x = 0.0;
  double y = 0.0;
  double visibility = 0.0;
  double phase_deg = 0.0;  // measured, wrapped
  double gamma_b_deg = 0.0;  // adiabatic geometric prediction, unwrapped
  double eta_deg = 0.0;  // phase_deg - gamma_b_deg, wrapped
};

struct BerryFit {
  int loops = 1;
  bool echo = false;
  PhaseFit free_slope;
  PhaseFit fixed_slope;  // slope pinned to the geometric law
  double expected_slope = 0.0;
};

struct BerrySweep {
  std::vector<BerryResult> points;
  std::vector<BerryFit> fits;
  InvariantSummary invariants;
  ExperimentReport report;
};

struct StarkPoint {
  double rabi_mhz = 0.0;
  double delta_mhz = 0.0;
  double tau_ns = 0.0;
  double eta_deg = 0.0;  // unwrapped along tau
};

struct StarkShift {
  double rabi_mhz = 0.0;
  double delta_mhz = 0.0;
  double sigma_eta_mhz = 0.0;
  double stderr_mhz = 0.0;
};

struct StarkLine {
  double rabi_mhz = 0.0;
  double slope = 0.0;  // Sigma_eta / delta
  Interval slope_ci;
  double predicted_slope = 0.0;
};

struct StarkSweep {
  std::vector<StarkPoint> points;
  std::vector<StarkShift> shifts;
  std::vector<StarkLine> lines;
  InvariantSummary invariants;
  ExperimentReport report;
};

struct VisibilityPoint {
  double rabi_mhz = 0.0;
  double tau_ns = 0.0;
  double visibility = 0.0;
  Interval visibility_ci;
  double eta_deg = 0.0;
};

struct VisibilityCurve {
  double rabi_mhz = 0.0;
  double threshold_ns = 0.0;  // half-maximum turn-on, log-interpolated
  double peak_tau_ns = 0.0;
  double peak_visibility = 0.0;
  bool rises_then_decays = false;
};

struct VisibilityMap {
  std::vector<VisibilityPoint> points;
  std::vector<VisibilityCurve> curves;
  InvariantSummary invariants;
  ExperimentReport report;
};

enum class NoiseKind { Theta, Phi };

struct NoisePoint {
  NoiseKind kind = NoiseKind::Phi;
  double s_deg = 0.0;
  double tau_ns = 0.0;
  double wedge_deg = 0.0;
  std::uint64_t master_seed = 0;
  DistributionStats stats;
  double analytic_deg = 0.0;  // prediction for phase noise, NaN for theta noise
  std::vector<EnsembleRun> runs;
};

struct NoiseRobustness {
  std::vector<NoisePoint> points;
  /// Per (tau, wedge): least-squares slope of sigma against s_phi through
  /// the origin, and the matching analytic slope.
  struct PhiSlope {
    double tau_ns;
    double wedge_deg;
    double slope;
    double analytic_slope;
  };
  std::vector<PhiSlope> phi_slopes;
  /// Per (s_phi, wedge): exponent of sigma ~ tau^p.
  struct TauLaw {
    double s_phi_deg;
    double wedge_deg;
    double exponent;
    Interval exponent_ci;
  };
  std::vector<TauLaw> tau_laws;
  ExperimentReport report;
};

TrajectoryExperiment run_trajectory(const ExperimentConfig& config);
PlComparison run_pl_comparison(const ExperimentConfig& config);
BerrySweep run_berry_sweep(const ExperimentConfig& config);
StarkSweep run_stark_sweep(const ExperimentConfig& config);
VisibilityMap run_visibility_map(const ExperimentConfig& config);
NoiseRobustness run_noise_robustness(const ExperimentConfig& config);
ExperimentReport run_schedule_dump(const ExperimentConfig& config);

/// Dispatches on config.kind.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace stirap
