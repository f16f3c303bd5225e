#include "stirap/experiments.hpp"

#include "stirap/errors.hpp"
#include "stirap/geometry.hpp"
#include "stirap/parallel.hpp"
#include "stirap/units.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <tuple>

namespace stirap {

void InvariantSummary::add(const PropagationDiagnostics& d) {
  ++propagations;
  max_trace_error = std::max(max_trace_error, d.max_trace_error);
  max_hermiticity_error = std::max(max_hermiticity_error, d.max_hermiticity_error);
  min_eigenvalue = std::min(min_eigenvalue, d.min_eigenvalue);
  max_substeps = std::max(max_substeps, d.substeps);
}

nlohmann::json InvariantSummary::to_json() const {
  return {{"propagations", propagations},
          {"max_trace_error", max_trace_error},
          {"max_hermiticity_error", max_hermiticity_error},
          {"min_eigenvalue", min_eigenvalue},
          {"max_substeps", max_substeps}};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = kNaN;
  int dof = 0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("linear fit needs at least two distinct abscissae");
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  line.dof = static_cast<int>(x.size()) - 2;
  if (line.dof > 0) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - line.intercept - line.slope * x[i];
      ssr += r * r;
    }
    line.slope_se = std::sqrt(ssr / line.dof / sxx);
  }
  return line;
}

Interval line_ci(const Line& line) {
  if (line.dof < 1) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double t = boost::math::quantile(boost::math::students_t(line.dof), 0.975);
  return {line.slope - t * line.slope_se, line.slope + t * line.slope_se};
}

nlohmann::json interval_json(const Interval& i) { return {finite_or_null(i.lo), finite_or_null(i.hi)}; }

nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : config_entries(config)) j[key] = value;
  return j;
}

ExperimentReport new_report(const ExperimentConfig& config) {
  ExperimentReport report;
  report.experiment = std::string(to_string(config.kind));
  report.summary["experiment"] = report.experiment;
  report.summary["seed"] = config.seed;
  report.summary["config"] = config_json(config);
  return report;
}

std::size_t nearest_index(const std::vector<double>& times, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - target) < std::abs(times[best] - target)) best = i;
  }
  return best;
}

// Times where the schedule's theta crosses pi/2 on each half of the loop.
std::pair<double, double> equator_times(const PulseSchedule& schedule) {
  const std::vector<ScheduleSample> samples = schedule.samples();
  double out = kNaN;
  double in = kNaN;
  const double half = 0.5 * kPi;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const ScheduleSample& a = samples[i - 1];
    const ScheduleSample& b = samples[i];
    if (b.t == a.t) continue;
    if ((a.theta - half) * (b.theta - half) <= 0.0 && a.theta != b.theta) {
      const double t = a.t + (half - a.theta) / (b.theta - a.theta) * (b.t - a.t);
      if (a.theta < b.theta && std::isnan(out)) out = t;
      if (a.theta > b.theta) in = t;
    }
  }
  return {out, in};
}

double bloch_norm(const BlochVector& b) { return b.magnitude(); }

TrajectoryFeatures trajectory_features(const Trajectory& traj, const PulseSchedule& schedule) {
  TrajectoryFeatures f;
  const double tau = schedule.duration();
  const double half = 0.5 * tau;
  const std::vector<double>& t = traj.times;
  std::vector<double> norm;
  norm.reserve(t.size());
  for (const BlochVector& b : traj.bloch_spin) norm.push_back(bloch_norm(b));

  f.final_norm = norm.back();
  std::tie(f.equator_out_ns, f.equator_in_ns) = equator_times(schedule);

  f.outbound_dip_norm = std::numeric_limits<double>::infinity();
  double steepest_out = 0.0;
  double steepest_in = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= half && norm[i] < f.outbound_dip_norm) {
      f.outbound_dip_norm = norm[i];
      f.outbound_dip_ns = t[i];
    }
    if (i == 0 || t[i] == t[i - 1]) continue;
    const double rate = (norm[i] - norm[i - 1]) / (t[i] - t[i - 1]);
    const double mid = 0.5 * (t[i] + t[i - 1]);
    if (mid <= half && rate < steepest_out) {
      steepest_out = rate;
      f.steepest_out_ns = mid;
    }
    if (mid > half && rate < steepest_in) {
      steepest_in = rate;
      f.steepest_in_ns = mid;
    }
  }
  f.pole_norm = norm[nearest_index(t, half)];
  const double window = 0.1 * tau;
  f.dips_at_equator = std::abs(f.steepest_out_ns - f.equator_out_ns) <= window &&
                      std::abs(f.steepest_in_ns - f.equator_in_ns) <= window;
  f.pole_revival = f.outbound_dip_ns < half - 0.05 * tau && f.pole_norm - f.outbound_dip_norm > 0.02;
  return f;
}

void check_readout(double x, double y) {
  if (x * x + y * y > 1.0 + 1e-6) {
    throw NumericalError(fmt::format("readout ({:g}, {:g}) lies outside the unit disk", x, y));
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  return out.str();
}

}  // namespace

TrajectoryExperiment run_trajectory(const ExperimentConfig& config) {
  validate_config(config);
  const LambdaParams params = config.effective_params();
  const PulseSchedule loop = tangerine(config.schedule.loop);
  TrajectoryExperiment result;

  result.trajectory = propagate(DensityMatrix::basis(Level::Minus), repeated_loops(loop, 1, config.schedule.sign),
                                params, config.integration);
  result.invariants.add(result.trajectory.diagnostics);
  result.features = trajectory_features(result.trajectory, loop);

  const std::vector<double>& wedges = config.sweep.wedge_deg;
  result.longitudes.resize(wedges.size());
  std::vector<PropagationDiagnostics> diags(wedges.size());
  PropagationOptions options = config.integration;
  options.keep_states = false;
  const double crossing = result.features.equator_in_ns;
  parallel_for(wedges.size(), config.threads, [&](std::size_t i) {
    LoopSpec spec = config.schedule.loop;
    spec.wedge_deg = wedges[i];
    const Trajectory traj =
        propagate(DensityMatrix::basis(Level::Minus), repeated_loops(tangerine(spec), 1, LoopSign::Positive),
                  params, options);
    const BlochVector b = traj.bloch_spin[nearest_index(traj.times, crossing)];
    result.longitudes[i] = {wedges[i], to_degrees(b.azimuth()), wrap_degrees(wedges[i] + 180.0), b.magnitude()};
    diags[i] = traj.diagnostics;
  });
  for (const auto& d : diags) result.invariants.add(d);

  ExperimentReport report = new_report(config);
  report.files.push_back({"trajectory.csv", trajectory_csv(result.trajectory)});
  if (!wedges.empty()) {
    Table table({"wedge_deg", "azimuth_deg", "expected_azimuth_deg", "bloch_norm"});
    table.comment("Bloch vector on (-1_g, +1_g) at the inbound equator crossing, one row per wedge angle");
    table.comment(fmt::format("crossing time {:.6f} ns; angles in degrees", crossing));
    for (const LongitudeRow& r : result.longitudes) {
      table.add_row({r.wedge_deg, r.azimuth_deg, r.expected_deg, r.norm});
    }
    report.files.push_back({"longitudes.csv", table.csv()});
  }
  const TrajectoryFeatures& f = result.features;
  report.summary["results"] = {
      {"final_bloch_norm", f.final_norm},
      {"equator_out_ns", f.equator_out_ns},
      {"equator_in_ns", f.equator_in_ns},
      {"outbound_dip_ns", f.outbound_dip_ns},
      {"outbound_dip_norm", f.outbound_dip_norm},
      {"pole_norm", f.pole_norm},
      {"steepest_out_ns", f.steepest_out_ns},
      {"steepest_in_ns", f.steepest_in_ns},
      {"dips_at_equator", f.dips_at_equator},
      {"pole_revival", f.pole_revival},
      {"emitted_photons", result.trajectory.emitted_photons},
      {"substeps", result.trajectory.diagnostics.substeps},
      {"convergence_delta", result.trajectory.diagnostics.convergence_delta},
  };
  report.summary["invariants"] = result.invariants.to_json();
  result.report = std::move(report);
  return result;
}

PlComparison run_pl_comparison(const ExperimentConfig& config) {
  validate_config(config);
  const LambdaParams params = config.effective_params();
  const PulseSchedule loop = tangerine(config.schedule.loop);
  const double tau = loop.duration();
  PlComparison result;

  result.stirap = propagate(DensityMatrix::basis(Level::Minus), repeated_loops(loop, 1, LoopSign::Positive),
                            params, config.integration);

  LambdaParams cpt_params = params;
  cpt_params.one_photon_detuning_mhz = 0.0;
  cpt_params.two_photon_detuning_mhz = 0.0;
  const double rabi = params.rabi_mhz;
  const ProtocolSchedule cpt({HoldSegment{0.5 * tau, DriveSample{rabi, 0.0, 0.0}},
                              HoldSegment{0.5 * tau, DriveSample{0.0, rabi * params.rabi_ratio, 0.0}}},
                             false);
  result.cpt = propagate(DensityMatrix::basis(Level::Minus), cpt, cpt_params, config.integration);
  result.invariants.add(result.stirap.diagnostics);
  result.invariants.add(result.cpt.diagnostics);

  result.stirap_mean_rate = result.stirap.emitted_photons / tau;
  result.cpt_peak_rate = *std::max_element(result.cpt.pl_rate.begin(), result.cpt.pl_rate.end());
  result.ratio = result.cpt_peak_rate / result.stirap_mean_rate;

  const std::vector<double>& t = result.stirap.times;
  double peak_out = -1.0;
  double peak_in = -1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double rate = result.stirap.pl_rate[i];
    if (t[i] <= 0.5 * tau && rate > peak_out) {
      peak_out = rate;
      result.stirap_peak_out_ns = t[i];
    }
    if (t[i] > 0.5 * tau && rate > peak_in) {
      peak_in = rate;
      result.stirap_peak_in_ns = t[i];
    }
  }
  result.equator_out_ns = kNaN;
  result.equator_in_ns = kNaN;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double za = result.stirap.bloch_spin[i - 1].z;
    const double zb = result.stirap.bloch_spin[i].z;
    if (za > 0.0 && zb <= 0.0 && std::isnan(result.equator_out_ns)) {
      result.equator_out_ns = t[i - 1] + za / (za - zb) * (t[i] - t[i - 1]);
    }
    if (za < 0.0 && zb >= 0.0) result.equator_in_ns = t[i - 1] + za / (za - zb) * (t[i] - t[i - 1]);
  }

  ExperimentReport report = new_report(config);
  Table table({"protocol", "t_ns", "pl_rate_per_ns"});
  table.comment("photoluminescence rate Gamma_tot * rho_(A2,A2); every decay counts as one photon");
  table.comment("units: t in ns, rate in photons/ns; protocol is stirap or cpt");
  for (std::size_t i = 0; i < t.size(); ++i) table.add_row({std::string("stirap"), t[i], result.stirap.pl_rate[i]});
  for (std::size_t i = 0; i < result.cpt.times.size(); ++i) {
    table.add_row({std::string("cpt"), result.cpt.times[i], result.cpt.pl_rate[i]});
  }
  report.files.push_back({"pl.csv", table.csv()});
  report.summary["results"] = {
      {"stirap_photons", result.stirap.emitted_photons},
      {"cpt_photons", result.cpt.emitted_photons},
      {"stirap_mean_rate_per_ns", result.stirap_mean_rate},
      {"cpt_peak_rate_per_ns", result.cpt_peak_rate},
      {"cpt_peak_over_stirap_mean", result.ratio},
      {"stirap_peak_out_ns", result.stirap_peak_out_ns},
      {"stirap_peak_in_ns", result.stirap_peak_in_ns},
      {"equator_out_ns", finite_or_null(result.equator_out_ns)},
      {"equator_in_ns", finite_or_null(result.equator_in_ns)},
  };
  report.summary["invariants"] = result.invariants.to_json();
  result.report = std::move(report);
  return result;
}

namespace {

struct BerryTask {
  int loops;
  double wedge_deg;
  std::string pattern;
};

ProtocolSchedule berry_protocol(const PulseSchedule& loop, const BerryTask& task) {
  if (task.pattern == "echo") return echo_loops(loop, task.loops);
  if (task.pattern == "+-") {
    const SignedLoop loops[] = {{loop, LoopSign::Positive}, {loop, LoopSign::Negative}};
    return compose(loops, false);
  }
  return repeated_loops(loop, task.loops, task.pattern == "+" ? LoopSign::Positive : LoopSign::Negative);
}

// Final reference-pair projections, optionally through the shot model.
std::pair<double, double> readout(const DensityMatrix& rho, const ExperimentConfig& config, std::size_t index) {
  const BlochVector b = bloch_of(rho, kReferencePair);
  if (config.readout == ReadoutMode::Ideal) {
    check_readout(b.x, b.y);
    return {b.x, b.y};
  }
  return {sampled_projection(b.x, config.noise.photons, derive_seed(config.seed, index, SeedKind::ReadoutX)),
          sampled_projection(b.y, config.noise.photons, derive_seed(config.seed, index, SeedKind::ReadoutY))};
}

nlohmann::json fit_json(const PhaseFit& fit) {
  return {{"amplitude", fit.amplitude},
          {"amplitude_ci", interval_json(fit.amplitude_ci)},
          {"eta_deg", fit.eta_deg},
          {"eta_ci_deg", interval_json(fit.eta_ci)},
          {"slope", fit.slope},
          {"slope_ci", interval_json(fit.slope_ci)},
          {"slope_fixed", fit.slope_fixed},
          {"eta_identifiable", fit.eta_identifiable},
          {"rms_residual", fit.rms_residual},
          {"max_residual", fit.max_residual},
          {"points", fit.points}};
}

}  // namespace

BerrySweep run_berry_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const LambdaParams params = config.effective_params();
  const bool echo = config.schedule.echo;
  const std::vector<int> loop_counts = config.sweep.loops.empty() ? std::vector<int>{config.schedule.loops}
                                                                  : config.sweep.loops;
  std::vector<BerryTask> tasks;
  for (int n : loop_counts) {
    if (echo && n % 2 != 0) throw ConfigError("echo sweeps need even loop counts");
    for (double w : config.sweep.wedge_deg) {
      if (echo) {
        tasks.push_back({n, w, "echo"});
        continue;
      }
      tasks.push_back({n, w, "+"});
      tasks.push_back({n, w, "-"});
      if (n == 1) tasks.push_back({2, w, "+-"});
    }
  }

  BerrySweep result;
  result.points.resize(tasks.size());
  std::vector<PropagationDiagnostics> diags(tasks.size());
  PropagationOptions options = config.integration;
  options.keep_states = false;
  options.record_every_ns = std::max(options.record_every_ns, config.schedule.loop.tau_ns);
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    const BerryTask& task = tasks[i];
    LoopSpec spec = config.schedule.loop;
    spec.wedge_deg = task.wedge_deg;
    const ProtocolSchedule protocol = berry_protocol(tangerine(spec), task);
    const Trajectory traj = propagate(prepared_reference_state(), protocol, params, options);
    const auto [x, y] = readout(traj.final_state, config, i);
    BerryResult& r = result.points[i];
    r.wedge_deg = task.wedge_deg;
    r.pattern = task.pattern;
    r.loops = task.loops;
    r.x = x;
    r.y = y;
    r.visibility = std::hypot(x, y);
    r.phase_deg = to_degrees(std::atan2(y, x));
    r.gamma_b_deg = adiabatic_readout_phase(protocol);
    r.eta_deg = wrap_degrees(r.phase_deg - r.gamma_b_deg);
    diags[i] = traj.diagnostics;
  });
  for (const auto& d : diags) result.invariants.add(d);

  for (int n : loop_counts) {
    std::vector<PhasePoint> data;
    for (const BerryResult& r : result.points) {
      if (r.loops != n) continue;
      if (r.pattern == "echo" || r.pattern == "+") data.push_back({r.wedge_deg, 1, r.x, r.y});
      if (r.pattern == "-") data.push_back({r.wedge_deg, -1, r.x, r.y});
    }
    BerryFit fit;
    fit.loops = n;
    fit.echo = echo;
    fit.expected_slope = echo ? n : -n;
    fit.free_slope = fit_phase_model(data);
    fit.fixed_slope = fit_phase_model(data, fit.expected_slope);
    result.fits.push_back(fit);
  }

  ExperimentReport report = new_report(config);
  Table table({"wedge_deg", "pattern", "loops", "x", "y", "visibility", "phase_deg", "gamma_b_deg", "eta_deg"});
  table.comment("readout of the (0_g, -1_g) pair after each protocol, prepared in (|0_g> + |-1_g>)/sqrt(2)");
  table.comment("x = 2 Re rho_(0,-1), y = -2 Im rho_(0,-1); phases in degrees; gamma_b_deg is the adiabatic "
                "geometric prediction, eta_deg the measured remainder");
  table.comment(fmt::format("readout mode {}", to_string(config.readout)));
  for (const BerryResult& r : result.points) {
    table.add_row({r.wedge_deg, r.pattern, static_cast<std::int64_t>(r.loops), r.x, r.y, r.visibility, r.phase_deg,
                   r.gamma_b_deg, r.eta_deg});
  }
  report.files.push_back({"berry.csv", table.csv()});
  nlohmann::json fits = nlohmann::json::array();
  for (const BerryFit& f : result.fits) {
    fits.push_back({{"loops", f.loops},
                    {"echo", f.echo},
                    {"expected_slope", f.expected_slope},
                    {"free_slope", fit_json(f.free_slope)},
                    {"fixed_slope", fit_json(f.fixed_slope)}});
  }
  report.summary["results"] = {{"fits", fits}};
  report.summary["invariants"] = result.invariants.to_json();
  result.report = std::move(report);
  return result;
}

StarkSweep run_stark_sweep(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<double> taus = config.sweep.tau_ns;
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  struct Task {
    double rabi;
    double delta;
    double tau;
    LoopSign sign;
  };
  std::vector<Task> tasks;
  for (double r : config.sweep.rabi_mhz)
    for (double d : config.sweep.delta_mhz)
      for (double t : taus)
        for (LoopSign s : {LoopSign::Positive, LoopSign::Negative}) tasks.push_back({r, d, t, s});

  std::vector<std::complex<double>> z(tasks.size());
  std::vector<double> gamma(tasks.size());
  std::vector<PropagationDiagnostics> diags(tasks.size());
  PropagationOptions options = config.integration;
  options.keep_states = false;
  options.record_every_ns = std::max(options.record_every_ns, taus.back());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    LambdaParams params = config.effective_params();
    params.rabi_mhz = task.rabi;
    params.two_photon_detuning_mhz = task.delta;
    LoopSpec spec = config.schedule.loop;
    spec.tau_ns = task.tau;
    const ProtocolSchedule protocol = repeated_loops(tangerine(spec), 1, task.sign);
    const Trajectory traj = propagate(prepared_reference_state(), protocol, params, options);
    const auto [x, y] = readout(traj.final_state, config, i);
    z[i] = {x, y};
    gamma[i] = adiabatic_readout_phase(protocol);
    diags[i] = traj.diagnostics;
  });

  StarkSweep result;
  for (const auto& d : diags) result.invariants.add(d);
  const double predicted = stark_slope(tangerine(config.schedule.loop));

  Table eta_table({"rabi_mhz", "delta_mhz", "tau_ns", "x_plus", "y_plus", "x_minus", "y_minus", "eta_deg"});
  eta_table.comment("dynamic phase eta from the + and - loop readouts, unwrapped along tau; eta in degrees");
  std::size_t i = 0;
  for (double rabi : config.sweep.rabi_mhz) {
    std::vector<double> deltas;
    std::vector<double> shifts;
    for (double delta : config.sweep.delta_mhz) {
      std::vector<double> etas;
      double previous = kNaN;
      for (double tau : taus) {
        const std::complex<double> zp = z[i];
        const std::complex<double> zm = z[i + 1];
        // z+ z- = A^2 exp(2 i eta) fixes eta up to 180 degrees.
        const double half = 0.5 * to_degrees(std::arg(zp * zm));
        const double reference =
            std::isnan(previous) ? wrap_degrees(to_degrees(std::arg(zp)) - gamma[i]) : previous;
        const double eta = half + 180.0 * std::round((reference - half) / 180.0);
        etas.push_back(eta);
        previous = eta;
        eta_table.add_row({rabi, delta, tau, zp.real(), zp.imag(), zm.real(), zm.imag(), eta});
        result.points.push_back({rabi, delta, tau, eta});
        i += 2;
      }
      const Line line = fit_line(taus, etas);
      // eta in degrees against tau in ns; -1/360 deg^-1 * 1e3 gives MHz.
      const double shift = -line.slope / 360.0 * 1e3;
      const double se = line.slope_se / 360.0 * 1e3;
      result.shifts.push_back({rabi, delta, shift, se});
      deltas.push_back(delta);
      shifts.push_back(shift);
    }
    StarkLine stark{rabi, kNaN, {kNaN, kNaN}, predicted};
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() >= 2) {
      const Line line = fit_line(deltas, shifts);
      stark.slope = line.slope;
      stark.slope_ci = line_ci(line);
    }
    result.lines.push_back(stark);
  }

  ExperimentReport report = new_report(config);
  report.files.push_back({"stark_eta.csv", eta_table.csv()});
  Table shift_table({"rabi_mhz", "delta_mhz", "sigma_eta_mhz", "sigma_eta_stderr_mhz", "predicted_mhz"});
  shift_table.comment("dark-state energy shift -(1/360 deg) d eta / d tau, in cyclic MHz");
  shift_table.comment(fmt::format("predicted = {:.10g} * delta (time average of sin^2(theta/2))", predicted));
  for (const StarkShift& s : result.shifts) {
    shift_table.add_row({s.rabi_mhz, s.delta_mhz, s.sigma_eta_mhz, s.stderr_mhz, predicted * s.delta_mhz});
  }
  report.files.push_back({"stark_shift.csv", shift_table.csv()});
  nlohmann::json lines = nlohmann::json::array();
  for (const StarkLine& l : result.lines) {
    lines.push_back({{"rabi_mhz", l.rabi_mhz},
                     {"slope", finite_or_null(l.slope)},
                     {"slope_ci", interval_json(l.slope_ci)},
                     {"predicted_slope", l.predicted_slope}});
  }
  report.summary["results"] = {{"lines", lines}};
  report.summary["invariants"] = result.invariants.to_json();
  result.report = std::move(report);
  return result;
}

VisibilityMap run_visibility_map(const ExperimentConfig& config) {
  validate_config(config);
  const int loops = config.schedule.loops;
  if (loops % 2 != 0) throw ConfigError("visibility-map needs an even schedule.loops");
  std::vector<double> taus = config.sweep.tau_ns;
  std::sort(taus.begin(), taus.end());
  const std::vector<double>& wedges = config.sweep.wedge_deg;

  struct Task {
    double rabi;
    double tau;
    double wedge;
  };
  std::vector<Task> tasks;
  for (double r : config.sweep.rabi_mhz)
    for (double t : taus)
      for (double w : wedges) tasks.push_back({r, t, w});

  std::vector<PhasePoint> data(tasks.size());
  std::vector<PropagationDiagnostics> diags(tasks.size());
  PropagationOptions options = config.integration;
  options.keep_states = false;
  options.record_every_ns = std::max(options.record_every_ns, taus.back());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    LambdaParams params = config.effective_params();
    params.rabi_mhz = task.rabi;
    LoopSpec spec = config.schedule.loop;
    spec.tau_ns = task.tau;
    spec.wedge_deg = task.wedge;
    const Trajectory traj = propagate(prepared_reference_state(), echo_loops(tangerine(spec), loops), params, options);
    const auto [x, y] = readout(traj.final_state, config, i);
    data[i] = {task.wedge, 1, x, y};
    diags[i] = traj.diagnostics;
  });

  VisibilityMap result;
  for (const auto& d : diags) result.invariants.add(d);
  const std::size_t per_point = wedges.size();
  for (std::size_t p = 0; p * per_point < tasks.size(); ++p) {
    const std::span<const PhasePoint> slice(data.data() + p * per_point, per_point);
    const PhaseFit fit = fit_phase_model(slice, static_cast<double>(loops));
    result.points.push_back({tasks[p * per_point].rabi, tasks[p * per_point].tau, fit.amplitude, fit.amplitude_ci,
                             fit.eta_deg});
  }

  for (double rabi : config.sweep.rabi_mhz) {
    std::vector<const VisibilityPoint*> curve;
    for (const VisibilityPoint& p : result.points) {
      if (p.rabi_mhz == rabi) curve.push_back(&p);
    }
    VisibilityCurve c;
    c.rabi_mhz = rabi;
    std::size_t peak = 0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
      if (curve[k]->visibility > curve[peak]->visibility) peak = k;
    }
    c.peak_tau_ns = curve[peak]->tau_ns;
    c.peak_visibility = curve[peak]->visibility;
    const double half = 0.5 * c.peak_visibility;
    std::size_t k = 0;
    while (curve[k]->visibility < half) ++k;
    if (k == 0) {
      c.threshold_ns = curve[0]->tau_ns;
    } else {
      const double a0 = curve[k - 1]->visibility;
      const double a1 = curve[k]->visibility;
      const double l0 = std::log(curve[k - 1]->tau_ns);
      const double l1 = std::log(curve[k]->tau_ns);
      c.threshold_ns = std::exp(l0 + (half - a0) / (a1 - a0) * (l1 - l0));
    }
    c.rises_then_decays = peak > 0 && peak + 1 < curve.size() && curve.front()->visibility < half &&
                          curve.back()->visibility < 0.98 * c.peak_visibility;
    result.curves.push_back(c);
  }

  ExperimentReport report = new_report(config);
  Table table({"rabi_mhz", "tau_ns", "visibility", "visibility_lo", "visibility_hi", "eta_deg"});
  table.comment(fmt::format("echoed Berry sweeps ({} loops) fitted with total phase {} x wedge", loops, loops));
  table.comment(fmt::format("wedge angles: {}", fmt::join(wedges, ", ")));
  table.comment("visibility dimensionless with 95% interval; tau in ns; eta in degrees");
  for (const VisibilityPoint& p : result.points) {
    table.add_row({p.rabi_mhz, p.tau_ns, p.visibility, p.visibility_ci.lo, p.visibility_ci.hi, p.eta_deg});
  }
  report.files.push_back({"visibility.csv", table.csv()});
  nlohmann::json curves = nlohmann::json::array();
  for (const VisibilityCurve& c : result.curves) {
    curves.push_back({{"rabi_mhz", c.rabi_mhz},
                      {"threshold_ns", c.threshold_ns},
                      {"peak_tau_ns", c.peak_tau_ns},
                      {"peak_visibility", c.peak_visibility},
                      {"rises_then_decays", c.rises_then_decays}});
  }
  report.summary["results"] = {{"curves", curves}};
  report.summary["invariants"] = result.invariants.to_json();
  result.report = std::move(report);
  return result;
}

namespace {

std::string_view to_string(NoiseKind kind) { return kind == NoiseKind::Theta ? "theta" : "phi"; }

}  // namespace

NoiseRobustness run_noise_robustness(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> taus = config.sweep.tau_ns.empty() ? std::vector<double>{config.schedule.loop.tau_ns}
                                                               : config.sweep.tau_ns;
  const std::vector<double> wedges = config.sweep.wedge_deg.empty()
                                         ? std::vector<double>{config.schedule.loop.wedge_deg}
                                         : config.sweep.wedge_deg;
  NoiseRobustness result;
  for (double tau : taus) {
    for (double wedge : wedges) {
      const auto add = [&](NoiseKind kind, double s) {
        NoisePoint point;
        point.kind = kind;
        point.s_deg = s;
        point.tau_ns = tau;
        point.wedge_deg = wedge;
        result.points.push_back(std::move(point));
      };
      for (double s : config.sweep.s_phi_deg) add(NoiseKind::Phi, s);
      for (double s : config.sweep.s_theta_deg) add(NoiseKind::Theta, s);
    }
  }

  for (std::size_t p = 0; p < result.points.size(); ++p) {
    NoisePoint& point = result.points[p];
    EnsembleRequest request;
    request.loop = config.schedule.loop;
    request.loop.tau_ns = point.tau_ns;
    request.loop.wedge_deg = point.wedge_deg;
    request.echo = config.schedule.echo;
    request.params = config.effective_params();
    request.noise = config.noise;
    request.noise.s_phi_deg = point.kind == NoiseKind::Phi ? point.s_deg : 0.0;
    request.noise.s_theta_deg = point.kind == NoiseKind::Theta ? point.s_deg : 0.0;
    request.noise.master_seed = derive_seed(config.seed, p, SeedKind::Ensemble);
    request.mode = config.ensemble_mode;
    request.readout = config.readout;
    request.propagation = config.integration;
    request.threads = config.threads;
    EnsembleResult ensemble = monte_carlo_berry(request);
    point.master_seed = request.noise.master_seed;
    point.stats = ensemble.stats;
    point.runs = std::move(ensemble.runs);
    point.analytic_deg = point.kind == NoiseKind::Phi ? phase_noise_sigma(point.s_deg, config.noise.bandwidth_mhz, point.tau_ns)
                                                 : kNaN;
  }

  for (double tau : taus) {
    for (double wedge : wedges) {
      double sxy = 0.0;
      double sxx = 0.0;
      for (const NoisePoint& p : result.points) {
        if (p.kind != NoiseKind::Phi || p.tau_ns != tau || p.wedge_deg != wedge) continue;
        sxy += p.s_deg * p.stats.sigma_deg;
        sxx += p.s_deg * p.s_deg;
      }
      if (sxx > 0.0) {
        result.phi_slopes.push_back({tau, wedge, sxy / sxx, phase_noise_sigma(1.0, config.noise.bandwidth_mhz, tau)});
      }
    }
  }
  if (taus.size() >= 2) {
    for (double s : config.sweep.s_phi_deg) {
      for (double wedge : wedges) {
        std::vector<double> lx;
        std::vector<double> ly;
        for (const NoisePoint& p : result.points) {
          if (p.kind != NoiseKind::Phi || p.s_deg != s || p.wedge_deg != wedge || !(p.stats.sigma_deg > 0.0)) {
            continue;
          }
          lx.push_back(std::log(p.tau_ns));
          ly.push_back(std::log(p.stats.sigma_deg));
        }
        if (lx.size() < 2) continue;
        const Line line = fit_line(lx, ly);
        result.tau_laws.push_back({s, wedge, line.slope, line_ci(line)});
      }
    }
  }

  ExperimentReport report = new_report(config);
  Table summary({"point", "kind", "s_deg", "tau_ns", "wedge_deg", "runs", "master_seed", "mean_deg", "sigma_raw_deg",
                 "sigma_shot_deg", "sigma_deg", "sigma_lo_deg", "sigma_hi_deg", "mean_visibility", "analytic_sigma_deg"});
  summary.comment(fmt::format("ensembles in {} mode with {} readout; echo {}", to_string(config.ensemble_mode),
                              to_string(config.readout), config.schedule.echo ? "on" : "off"));
  summary.comment("sigma_deg is the intrinsic per-loop width with 95% interval; angles in degrees, tau in ns");
  Table runs({"point", "run", "seed", "x", "y", "gamma_deg", "visibility"});
  runs.comment("per-run readout of every ensemble; gamma in degrees; seed is the phase-noise seed");
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    const NoisePoint& n = result.points[p];
    const DistributionStats& s = n.stats;
    summary.add_row({static_cast<std::int64_t>(p), std::string(to_string(n.kind)), n.s_deg, n.tau_ns, n.wedge_deg,
                     static_cast<std::int64_t>(s.runs), n.master_seed, s.mean_deg, s.sigma_raw_deg, s.sigma_shot_deg,
                     s.sigma_deg, s.sigma_ci.lo, s.sigma_ci.hi, s.mean_visibility, n.analytic_deg});
    for (const EnsembleRun& r : n.runs) {
      runs.add_row({static_cast<std::int64_t>(p), static_cast<std::int64_t>(r.run), r.seed, r.x, r.y, r.gamma_deg,
                    r.visibility});
    }
    points.push_back({{"point", p},
                      {"kind", to_string(n.kind)},
                      {"s_deg", n.s_deg},
                      {"tau_ns", n.tau_ns},
                      {"wedge_deg", n.wedge_deg},
                      {"mean_deg", s.mean_deg},
                      {"mean_ci_deg", interval_json(s.mean_ci)},
                      {"sigma_raw_deg", s.sigma_raw_deg},
                      {"sigma_raw_ci_deg", interval_json(s.sigma_raw_ci)},
                      {"sigma_shot_deg", s.sigma_shot_deg},
                      {"sigma_deg", s.sigma_deg},
                      {"sigma_ci_deg", interval_json(s.sigma_ci)},
                      {"below_shot_noise", s.below_shot_noise},
                      {"mean_visibility", s.mean_visibility},
                      {"visibility_ci", interval_json(s.visibility_ci)},
                      {"analytic_sigma_deg", finite_or_null(n.analytic_deg)}});
  }
  report.files.push_back({"noise_summary.csv", summary.csv()});
  report.files.push_back({"ensembles.csv", runs.csv()});
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& s : result.phi_slopes) {
    slopes.push_back({{"tau_ns", s.tau_ns}, {"wedge_deg", s.wedge_deg}, {"slope", s.slope}, {"analytic_slope", s.analytic_slope}});
  }
  nlohmann::json laws = nlohmann::json::array();
  for (const auto& l : result.tau_laws) {
    laws.push_back({{"s_phi_deg", l.s_phi_deg},
                    {"wedge_deg", l.wedge_deg},
                    {"exponent", l.exponent},
                    {"exponent_ci", interval_json(l.exponent_ci)}});
  }
  report.summary["results"] = {{"points", points}, {"phi_slopes", slopes}, {"tau_laws", laws}};
  result.report = std::move(report);
  return result;
}

ExperimentReport run_schedule_dump(const ExperimentConfig& config) {
  validate_config(config);
  PulseSchedule loop = tangerine(config.schedule.loop);
  if (config.schedule.sign == LoopSign::Negative) loop = loop.reversed();
  std::ostringstream csv;
  write_schedule_csv(csv, loop, config.effective_params());
  ExperimentReport report = new_report(config);
  report.files.push_back({"schedule.csv", csv.str()});
  report.summary["results"] = {{"duration_ns", loop.duration()},
                               {"berry_integral_deg", berry_integral(loop)},
                               {"stark_slope", stark_slope(loop)}};
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::Trajectory: return run_trajectory(config).report;
    case ExperimentKind::PlCompare: return run_pl_comparison(config).report;
    case ExperimentKind::BerrySweep: return run_berry_sweep(config).report;
    case ExperimentKind::StarkSweep: return run_stark_sweep(config).report;
    case ExperimentKind::VisibilityMap: return run_visibility_map(config).report;
    case ExperimentKind::NoiseRobustness: return run_noise_robustness(config).report;
    case ExperimentKind::ScheduleDump: return run_schedule_dump(config);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace stirap
