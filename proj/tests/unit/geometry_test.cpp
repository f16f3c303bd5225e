#include "stirap/geometry.hpp"
#include "stirap/protocol.hpp"
#include "stirap/pulse.hpp"
#include "stirap/units.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace stirap {
namespace {

PulseSchedule default_loop(double tau = 1200.0, double wedge = 120.0) {
  return tangerine(tau, wedge, PulseShape::EomBessel, kCalibratedDwell);
}

// Variance of the Berry phase for OU phase noise on a constant polar velocity
// loop: the phase error is the integral of w'(t) dphi(t) with
// w = sin^2(theta/2), so var = int int w'(t) w'(s) C(t - s) dt ds.
double sigma_by_quadrature(double s_deg, double dnu_mhz, double tau_ns) {
  const int n = 1500;
  const double h = tau_ns / n;
  const double k = kTwoPi * dnu_mhz * 1e-3;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * h;
    w[i] = kPi / tau_ns * std::sin(kTwoPi * t / tau_ns);
  }
  double var = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) var += w[i] * w[j] * std::exp(-k * h * std::abs(i - j));
  return s_deg * std::sqrt(var * h * h);
}

TEST(DarkState, Examples) {
  const Vector4 a = dark_state(0.0, 1.0).amplitudes();
  EXPECT_EQ(a, Vector4(0, 1, 0, 0));
  const Vector4 b = dark_state(kPi, 0.0).amplitudes();
  EXPECT_NEAR((b - Vector4(0, 0, -1, 0)).norm(), 0.0, 1e-15);
  const Vector4 c = dark_state(kPi / 2, kPi / 2).amplitudes();
  EXPECT_NEAR((c - Vector4(0, 1, Complex(0, -1), 0) / std::sqrt(2.0)).norm(), 0.0, 1e-15);
}

TEST(Berry, TangerineGivesMinusWedge) {
  EXPECT_NEAR(berry_integral(default_loop()), -120.0, 1e-9);
  EXPECT_NEAR(berry_integral(default_loop(1200.0, 0.0)), 0.0, 1e-12);
  for (PulseShape shape : {PulseShape::SineRamp, PulseShape::SquareDwell}) {
    EXPECT_NEAR(berry_integral(tangerine(900.0, -75.0, shape, 0.2)), 75.0, 1e-9);
  }
}

TEST(Berry, GaugeShiftInvariant) {
  const PulseSchedule s = default_loop();
  const std::vector<double> shift(s.steps() + 1, 37.0);
  EXPECT_NEAR(berry_integral(inject_noise(s, {}, shift)), berry_integral(s), 1e-9);
}

TEST(Berry, ReversalNegates) {
  std::vector<double> dphi(default_loop().steps() + 1);
  for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = 10.0 * std::sin(0.013 * i);
  const PulseSchedule noisy = inject_noise(default_loop(), {}, dphi);
  // Equal up to the summation order of the quadrature.
  EXPECT_NEAR(berry_integral(noisy.reversed()), -berry_integral(noisy), 1e-10);
}

TEST(Berry, LoopsAdd) {
  const PulseSchedule s = default_loop(1200.0, 77.0);
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(berry_integral(repeated_loops(s, n, LoopSign::Positive)), n * berry_integral(s), 0.05);
  }
}

TEST(Berry, OpenPathRejected) {
  auto samples = tangerine(1200.0, 120.0, PulseShape::SineRamp, 0.0).samples();
  samples.resize(samples.size() - 100);
  EXPECT_THROW(berry_integral(std::span<const ScheduleSample>(samples)), std::invalid_argument);
}

TEST(Berry, ReadoutPhaseRejectsHolds) {
  const ProtocolSchedule hold({HoldSegment{10.0, DriveSample{}}}, false);
  EXPECT_THROW(adiabatic_readout_phase(hold), std::invalid_argument);
}

TEST(Stark, CalibratedShapeSlope) {
  EXPECT_NEAR(stark_slope(default_loop()), 0.55, 0.01);
  const StarkResult r = stark_prediction(default_loop(), 0.2);
  EXPECT_NEAR(r.sigma_eta_mhz, 0.2 * r.slope, 1e-15);
}

TEST(Stark, SymmetricShapesGiveOneHalf) {
  // Dwell 1 makes theta a step; the trapezoid rule is then exact only to one grid step.
  EXPECT_NEAR(stark_slope(tangerine(1200.0, 120.0, PulseShape::SquareDwell, 1.0)), 0.5, 1.0 / kDefaultSteps);
  EXPECT_NEAR(stark_slope(tangerine(1200.0, 120.0, PulseShape::SquareDwell, 0.0)), 0.5, 1e-9);
  EXPECT_NEAR(stark_slope(tangerine(1200.0, 120.0, PulseShape::SineRamp, 0.3)), 0.5, 1e-9);
}

TEST(Stark, SlopeWithinUnitInterval) {
  for (double dwell = 0.0; dwell <= 1.0; dwell += 0.125) {
    for (PulseShape shape : {PulseShape::EomBessel, PulseShape::SineRamp, PulseShape::SquareDwell}) {
      const double s = stark_slope(tangerine(1000.0, 30.0, shape, dwell));
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(PhaseNoiseSigma, Anchor) {
  EXPECT_NEAR(phase_noise_sigma(8.0, 3.0, 1200.0), 5.11, 0.01);
  EXPECT_NEAR(phase_noise_sigma(8.0, 3.0, 1200.0) / 8.0, 0.639, 0.001);
  EXPECT_EQ(phase_noise_sigma(0.0, 3.0, 1200.0), 0.0);
}

TEST(PhaseNoiseSigma, LargeBandwidthLimit) {
  const double s = phase_noise_sigma(14.0, 3.0, 12000.0);
  EXPECT_NEAR(s, 2.92, 0.01);
  EXPECT_NEAR(s / phase_noise_asymptote(14.0, 3.0, 12000.0), 1.0, 0.01);
  for (double x = 30.0; x < 300.0; x *= 1.5) {
    EXPECT_NEAR(phase_noise_sigma(1.0, 1.0, x * 1e3) / phase_noise_asymptote(1.0, 1.0, x * 1e3), 1.0, 0.01) << x;
  }
}

TEST(PhaseNoiseSigma, MonotoneInAmplitude) {
  double last = -1.0;
  for (double s = 0.0; s <= 30.0; s += 0.5) {
    const double v = phase_noise_sigma(s, 3.0, 1200.0);
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(PhaseNoiseSigma, MatchesCorrelationQuadrature) {
  for (double tau : {300.0, 1200.0, 4800.0}) {
    EXPECT_NEAR(phase_noise_sigma(8.0, 3.0, tau), sigma_by_quadrature(8.0, 3.0, tau), 2e-3 * phase_noise_sigma(8.0, 3.0, tau)) << tau;
  }
}

TEST(Adiabaticity, HalvesWhenTauDoubles) {
  const LambdaParams p;
  auto peak = [&](double tau) {
    const AdiabaticitySeries a = adiabaticity_metric(default_loop(tau), p);
    return *std::max_element(a.ratio.begin(), a.ratio.end());
  };
  EXPECT_NEAR(peak(2400.0) / peak(1200.0), 0.5, 1e-6);
}

TEST(Adiabaticity, ShrinksWithRabiFrequency) {
  LambdaParams p;
  double last = 1e300;
  for (double rabi : {10.0, 31.0, 100.0, 1000.0}) {
    p.rabi_mhz = rabi;
    const AdiabaticitySeries a = adiabaticity_metric(default_loop(), p);
    const double m = *std::max_element(a.ratio.begin(), a.ratio.end());
    EXPECT_LT(m, last);
    last = m;
  }
  EXPECT_LT(last, 1e-2);
}

TEST(Adiabaticity, PeaksNearEquatorCrossings) {
  const PulseSchedule s = default_loop();
  const AdiabaticitySeries a = adiabaticity_metric(s, LambdaParams{});
  const std::size_t half = a.times.size() / 2;
  const auto out = std::max_element(a.ratio.begin(), a.ratio.begin() + half);
  const auto in = std::max_element(a.ratio.begin() + half, a.ratio.end());
  const double t_out = a.times[out - a.ratio.begin()];
  const double t_in = a.times[in - a.ratio.begin()];
  // Equator crossings of the schedule.
  double eq_out = 0.0;
  double eq_in = 0.0;
  for (double t = 0.0; t < 1200.0; t += 0.05) {
    if (t < 600.0 && s.at(t).theta < kPi / 2) eq_out = t;
    if (t > 600.0 && s.at(t).theta > kPi / 2) eq_in = t;
  }
  EXPECT_NEAR(t_out, eq_out, 0.1 * 1200.0);
  EXPECT_NEAR(t_in, eq_in, 0.1 * 1200.0);
}

}  // namespace
}  // namespace stirap
