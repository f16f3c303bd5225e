#include "stirap/geometry.hpp"

#include "stirap/units.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace stirap {

StateVector dark_state(double theta, double phi) {
  Vector4 v = Vector4::Zero();
  v(index(Level::Minus)) = std::cos(0.5 * theta);
  v(index(Level::Plus)) = -std::sin(0.5 * theta) * std::polar(1.0, phi);
  return StateVector(v);
}

namespace {

double weight(double theta) {
  const double s = std::sin(0.5 * theta);
  return s * s;
}

}  // namespace

double berry_integral(std::span<const ScheduleSample> path) {
  if (path.size() < 2) throw std::invalid_argument("Berry integral needs at least two samples");
  const ScheduleSample& first = path.front();
  const ScheduleSample& last = path.back();
  const bool at_pole = first.theta == 0.0 || first.theta == kPi;
  const bool same_point = std::abs(first.theta - last.theta) < 1e-12 &&
                          (at_pole || std::abs(std::remainder(first.phi - last.phi, kTwoPi)) < 1e-12);
  if (!same_point) throw std::invalid_argument("Berry integral over an open path");

  double sum = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    sum += 0.5 * (weight(path[i - 1].theta) + weight(path[i].theta)) * (path[i].phi - path[i - 1].phi);
  }
  return -to_degrees(sum);
}

double berry_integral(const PulseSchedule& schedule) {
  const std::vector<ScheduleSample> path = schedule.samples();
  return berry_integral(path);
}

double berry_integral(const ProtocolSchedule& protocol) {
  double total = 0.0;
  for (const Segment& s : protocol.segments()) {
    if (const auto* loop = std::get_if<LoopSegment>(&s)) total += berry_integral(loop->schedule);
  }
  return total;
}

double adiabatic_readout_phase(const ProtocolSchedule& protocol) {
  double chi = 0.0;
  for (const Segment& s : protocol.segments()) {
    if (const auto* loop = std::get_if<LoopSegment>(&s)) {
      chi += berry_integral(loop->schedule);
    } else if (const auto* gate = std::get_if<GateSegment>(&s)) {
      if (gate->gate.kind != GateKind::Pi || !(gate->gate.pair == kReferencePair)) {
        throw std::invalid_argument("only pi pulses on (0_g, -1_g) have an adiabatic phase map");
      }
      chi = 2.0 * to_degrees(gate->gate.axis_phase) - chi;
    } else {
      throw std::invalid_argument("hold segments have no adiabatic phase map");
    }
  }
  return chi;
}

double stark_slope(const PulseSchedule& schedule) {
  const std::vector<ScheduleSample> path = schedule.samples();
  double sum = 0.0;
  double span = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double dt = std::abs(path[i].t - path[i - 1].t);
    sum += 0.5 * (weight(path[i - 1].theta) + weight(path[i].theta)) * dt;
    span += dt;
  }
  return sum / span;
}

StarkResult stark_prediction(const PulseSchedule& schedule, double delta_mhz) {
  const double slope = stark_slope(schedule);
  return {slope * delta_mhz, slope};
}

double phase_noise_sigma(double s_phi_deg, double bandwidth_mhz, double tau_ns) {
  if (s_phi_deg < 0.0 || bandwidth_mhz < 0.0 || tau_ns < 0.0) {
    throw std::invalid_argument("phase_noise_sigma inputs must be non-negative");
  }
  const double x = bandwidth_mhz * 1e-3 * tau_ns;
  const double q = 1.0 + x * x;
  const double factor = 0.5 * ((1.0 - std::exp(-kTwoPi * x)) / (q * q) + kPi * x / q);
  return s_phi_deg * std::sqrt(factor);
}

double phase_noise_asymptote(double s_phi_deg, double bandwidth_mhz, double tau_ns) {
  const double x = bandwidth_mhz * 1e-3 * tau_ns;
  return s_phi_deg * std::sqrt(kPi / (2.0 * x));
}

AdiabaticitySeries adiabaticity_metric(const PulseSchedule& schedule, const LambdaParams& params) {
  const std::size_t n = schedule.steps();
  const std::size_t mid = n / 2;
  const double dt = schedule.dt();
  AdiabaticitySeries out;
  out.times.reserve(n + 1);
  out.ratio.reserve(n + 1);

  const auto theta_at = [&](std::size_t k) {
    return schedule.at(dt * static_cast<double>(k), k > mid).theta;
  };
  constexpr int kBlock[3] = {index(Level::Minus), index(Level::Plus), index(Level::Excited)};

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    const bool inbound = k > mid;
    const SchedulePoint p = schedule.at(t, inbound);

    // One-sided differences at the ends and at the turning pole.
    const std::size_t lo = (k == 0 || k == mid + 1) ? k : k - 1;
    const std::size_t hi = (k == n || k == mid) ? k : k + 1;
    const double rate = std::abs(theta_at(hi) - theta_at(lo)) / (dt * static_cast<double>(hi - lo));

    const Matrix4 h = hamiltonian_at(params, drive_from_point(p, params));
    Eigen::Matrix3cd block;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) block(i, j) = h(kBlock[i], kBlock[j]);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(block);

    const Vector4 dark = dark_state(p.theta, p.phi).amplitudes();
    Eigen::Vector3cd dark3(dark(kBlock[0]), dark(kBlock[1]), dark(kBlock[2]));
    int dark_index = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double overlap = std::abs(solver.eigenvectors().col(i).dot(dark3));
      if (overlap > best) {
        best = overlap;
        dark_index = i;
      }
    }
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (i == dark_index) continue;
      gap = std::min(gap, std::abs(solver.eigenvalues()(i) - solver.eigenvalues()(dark_index)));
    }
    out.times.push_back(t);
    out.ratio.push_back(gap > 0.0 ? rate / gap : std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace stirap
