#include "stirap/pulse.hpp"

#include "stirap/units.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace stirap {

std::string_view to_string(PulseShape shape) {
  switch (shape) {
    case PulseShape::EomBessel: return "eom-bessel";
    case PulseShape::SineRamp: return "sine-ramp";
    case PulseShape::SquareDwell: return "square-dwell";
  }
  return "?";
}

PulseShape parse_shape(std::string_view text) {
  if (text == "eom-bessel") return PulseShape::EomBessel;
  if (text == "sine-ramp") return PulseShape::SineRamp;
  if (text == "square-dwell") return PulseShape::SquareDwell;
  throw std::invalid_argument("unknown pulse shape: " + std::string(text));
}

HarmonicAmplitudes eom_harmonics(double beta) {
  return {std::abs(std::cyl_bessel_j(0.0, beta)), std::abs(std::cyl_bessel_j(1.0, beta))};
}

HarmonicAmplitudes eom_bessel_map(double beta) {
  if (!(beta >= 0.0 && beta <= kBesselZero)) {
    throw std::invalid_argument("modulation depth outside [0, 2.405]");
  }
  static const double sideband_peak = std::cyl_bessel_j(1.0, kBesselZero);
  const HarmonicAmplitudes raw = eom_harmonics(beta);
  return {raw.carrier, raw.sideband / sideband_peak};
}

namespace {

struct RampPoint {
  double theta;
  double envelope;
};

// Polar angle along one half-loop. u runs from 0 (|-1_g> pole) to 1 (|+1_g>
// pole); a fraction `dwell` of the half is spent at the poles, split evenly.
RampPoint ramp(PulseShape shape, double dwell, double u) {
  double r;
  if (dwell >= 1.0) {
    r = u < 0.5 ? 0.0 : 1.0;
  } else {
    r = std::clamp((u - 0.5 * dwell) / (1.0 - dwell), 0.0, 1.0);
  }
  if (r <= 0.0) return {0.0, shape == PulseShape::EomBessel ? eom_harmonics(kBesselZero).sideband : 1.0};
  if (r >= 1.0) return {kPi, 1.0};

  switch (shape) {
    case PulseShape::EomBessel: {
      const double beta = kBesselZero * 0.5 * (1.0 + std::cos(kPi * r));
      const HarmonicAmplitudes h = eom_harmonics(beta);
      return {2.0 * std::atan2(h.carrier, h.sideband), std::hypot(h.carrier, h.sideband)};
    }
    case PulseShape::SineRamp: {
      const double s = std::sin(0.5 * kPi * r);
      return {kPi * s * s, 1.0};
    }
    case PulseShape::SquareDwell:
      return {kPi * r, 1.0};
  }
  return {0.0, 1.0};
}

}  // namespace

double PulseSchedule::wedge() const { return to_radians(spec_.wedge_deg); }

double PulseSchedule::noise_at(const std::vector<double>& values, double t) const {
  if (values.empty()) return 0.0;
  const double x = std::clamp(t / dt(), 0.0, static_cast<double>(spec_.steps));
  const auto k = std::min(static_cast<std::size_t>(x), spec_.steps - 1);
  const double frac = x - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

std::size_t PulseSchedule::pole_index(double t) const {
  // Grid times are products k * dt and may miss tau/2 by an ulp.
  const double eps = 1e-12 * spec_.tau_ns;
  if (std::abs(t) <= eps) return 0;
  if (std::abs(t - 0.5 * spec_.tau_ns) <= eps) return spec_.steps / 2;
  if (std::abs(t - spec_.tau_ns) <= eps) return spec_.steps;
  return static_cast<std::size_t>(-1);
}

SchedulePoint PulseSchedule::forward_at(double t, bool inbound) const {
  const double half = 0.5 * spec_.tau_ns;
  const double u = inbound ? (spec_.tau_ns - t) / half : t / half;
  const RampPoint base = ramp(spec_.shape, spec_.dwell_fraction, std::clamp(u, 0.0, 1.0));

  SchedulePoint p;
  p.envelope = base.envelope;
  p.theta = base.theta;
  if (!dtheta_.empty() && pole_index(t) == static_cast<std::size_t>(-1)) {
    p.theta = std::clamp(base.theta + noise_at(dtheta_, t), 0.0, kPi);
  }
  p.phi = (inbound ? wedge() : 0.0) + noise_at(dphi_, t);
  return p;
}

SchedulePoint PulseSchedule::at(double t, bool inbound) const {
  if (!reversed_) return forward_at(t, inbound);
  return forward_at(spec_.tau_ns - t, !inbound);
}

std::vector<ScheduleSample> PulseSchedule::samples() const {
  const std::size_t n = spec_.steps;
  const std::size_t mid = n / 2;
  std::vector<ScheduleSample> out;
  out.reserve(n + 3);

  const auto sample = [&](std::size_t k, bool inbound) {
    const double t = static_cast<double>(k) * dt();
    const SchedulePoint p = forward_at(t, inbound);
    return ScheduleSample{t, p.theta, p.phi, p.envelope, k};
  };
  for (std::size_t k = 0; k <= mid; ++k) out.push_back(sample(k, false));
  for (std::size_t k = mid; k <= n; ++k) out.push_back(sample(k, true));
  // Closing step back to the outbound longitude at |-1_g>.
  ScheduleSample closing = out.back();
  closing.phi -= wedge();
  out.push_back(closing);

  if (reversed_) {
    std::reverse(out.begin(), out.end());
    for (auto& s : out) s.t = spec_.tau_ns - s.t;
  }
  return out;
}

PulseSchedule PulseSchedule::reversed() const {
  PulseSchedule copy = *this;
  copy.reversed_ = !reversed_;
  return copy;
}

PulseSchedule tangerine(const LoopSpec& spec) {
  if (!(spec.tau_ns > 0.0)) throw std::invalid_argument("loop duration must be positive");
  if (!(std::abs(spec.wedge_deg) <= 360.0)) {
    throw std::invalid_argument("wedge angle outside [-360, 360] degrees; compose loops for more");
  }
  if (!(spec.dwell_fraction >= 0.0 && spec.dwell_fraction <= 1.0)) {
    throw std::invalid_argument("dwell fraction outside [0, 1]");
  }
  if (spec.steps < 1000 || spec.steps % 2 != 0) {
    throw std::invalid_argument("loop grid needs an even number of at least 1000 steps");
  }
  return PulseSchedule(spec);
}

PulseSchedule tangerine(double tau_ns, double wedge_deg, PulseShape shape, double dwell_fraction,
                        std::size_t steps) {
  return tangerine(LoopSpec{tau_ns, wedge_deg, shape, dwell_fraction, steps});
}

PulseSchedule inject_noise(const PulseSchedule& schedule, std::span<const double> dtheta_deg,
                           std::span<const double> dphi_deg) {
  if (schedule.is_noisy()) throw std::invalid_argument("schedule already carries noise");
  if (schedule.is_reversed()) throw std::invalid_argument("inject noise before reversing");
  const std::size_t expected = schedule.steps() + 1;
  const auto check = [&](std::span<const double> trace) {
    if (!trace.empty() && trace.size() != expected) {
      throw std::invalid_argument("noise trace does not match the schedule grid");
    }
  };
  check(dtheta_deg);
  check(dphi_deg);

  PulseSchedule out = schedule;
  const auto convert = [&](std::span<const double> trace) {
    std::vector<double> rad(expected, 0.0);
    for (std::size_t k = 0; k < trace.size(); ++k) rad[k] = to_radians(trace[k]);
    return rad;
  };
  if (dtheta_deg.empty() && dphi_deg.empty()) return out;
  out.dtheta_ = convert(dtheta_deg);
  out.dphi_ = convert(dphi_deg);
  return out;
}

DriveSample drive_from_point(const SchedulePoint& p, const LambdaParams& params) {
  const double amplitude = params.rabi_mhz * p.envelope;
  DriveSample d;
  d.phase = p.phi;
  // Exact zeros at the poles.
  d.omega_minus_mhz = p.theta <= 0.0 ? 0.0 : amplitude * std::sin(0.5 * p.theta);
  d.omega_plus_mhz = p.theta >= kPi ? 0.0 : params.rabi_ratio * amplitude * std::cos(0.5 * p.theta);
  return d;
}

DriveSample drive_of(const PulseSchedule& schedule, const LambdaParams& params, double t, bool inbound) {
  return drive_from_point(schedule.at(t, inbound), params);
}

void write_schedule_csv(std::ostream& out, const PulseSchedule& schedule, const LambdaParams& params) {
  fmt::print(out, "# tangerine loop: tau_ns={} wedge_deg={} shape={} dwell_fraction={} steps={}{}\n",
             schedule.duration(), schedule.spec().wedge_deg, to_string(schedule.spec().shape),
             schedule.spec().dwell_fraction, schedule.steps(), schedule.is_reversed() ? " reversed" : "");
  fmt::print(out, "# units: t in ns, angles in degrees, Rabi frequencies in cyclic MHz\n");
  fmt::print(out, "t_ns,theta_deg,phi_deg,omega_minus_mhz,omega_plus_mhz\n");
  for (const ScheduleSample& s : schedule.samples()) {
    const DriveSample d = drive_from_point({s.theta, s.phi, s.envelope}, params);
    fmt::print(out, "{:.6f},{:.10g},{:.10g},{:.10g},{:.10g}\n", s.t, to_degrees(s.theta),
               to_degrees(s.phi), d.omega_minus_mhz, d.omega_plus_mhz);
  }
}

}  // namespace stirap
