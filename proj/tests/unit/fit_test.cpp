#include "stirap/errors.hpp"
#include "stirap/fit.hpp"
#include "stirap/units.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace stirap {
namespace {

std::vector<PhasePoint> synthetic(double amplitude, double eta_deg, double slope, double noise, std::uint64_t seed,
                                  double wedge_start = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<PhasePoint> data;
  for (int sign : {1, -1}) {
    for (int k = 0; k < 12; ++k) {
      const double w = wedge_start + 30.0 * k;
      const double phase = to_radians(eta_deg + sign * slope * w);
      data.push_back({w, sign, amplitude * std::cos(phase) + g(rng), amplitude * std::sin(phase) + g(rng)});
    }
  }
  return data;
}

bool covers(const Interval& i, double v) { return i.lo <= v && v <= i.hi; }

TEST(Fit, RoundTripWithinIntervals) {
  const auto data = synthetic(0.22, 30.0, -1.0, 0.01, 4);
  const PhaseFit f = fit_phase_model(data);
  EXPECT_TRUE(covers(f.amplitude_ci, 0.22)) << f.amplitude;
  EXPECT_TRUE(covers(f.eta_ci, 30.0)) << f.eta_deg;
  EXPECT_TRUE(covers(f.slope_ci, -1.0)) << f.slope;
  EXPECT_TRUE(f.eta_identifiable);
  EXPECT_FALSE(f.slope_fixed);
  EXPECT_EQ(f.points, 24);
  EXPECT_LT(f.rms_residual, 0.02);
}

TEST(Fit, ExactDataRecoveredExactly) {
  const PhaseFit f = fit_phase_model(synthetic(0.7, -120.0, 2.0, 0.0, 1));
  EXPECT_NEAR(f.amplitude, 0.7, 1e-9);
  EXPECT_NEAR(f.eta_deg, -120.0, 1e-7);
  EXPECT_NEAR(f.slope, 2.0, 1e-9);
  EXPECT_LT(f.max_residual, 1e-9);
}

TEST(Fit, FixedSlope) {
  const auto data = synthetic(0.5, 10.0, -1.0, 0.02, 9);
  const PhaseFit f = fit_phase_model(data, -1.0);
  EXPECT_TRUE(f.slope_fixed);
  EXPECT_EQ(f.slope, -1.0);
  EXPECT_EQ(f.slope_ci.lo, -1.0);
  EXPECT_EQ(f.slope_ci.hi, -1.0);
  EXPECT_TRUE(covers(f.eta_ci, 10.0));
}

TEST(Fit, ZeroAmplitudeFlagsEta) {
  const PhaseFit f = fit_phase_model(synthetic(0.0, 0.0, -1.0, 0.0, 1));
  EXPECT_FALSE(f.eta_identifiable);
  const PhaseFit g = fit_phase_model(synthetic(0.0, 0.0, -1.0, 0.05, 2), -1.0);
  EXPECT_FALSE(g.eta_identifiable);
}

TEST(Fit, WrapCrossingDoesNotMatter) {
  // Phases sweep straight through +-180 degrees.
  const PhaseFit f = fit_phase_model(synthetic(0.3, 175.0, -1.0, 0.0, 1, 5.0));
  EXPECT_NEAR(std::abs(wrap_degrees(f.eta_deg - 175.0)), 0.0, 1e-7);
  EXPECT_NEAR(f.slope, -1.0, 1e-9);
}

TEST(Fit, RejectsDegenerateInput) {
  std::vector<PhasePoint> two = {{0.0, 1, 1.0, 0.0}, {30.0, 1, 0.8, 0.5}, {30.0, -1, 0.8, -0.5}};
  EXPECT_THROW(fit_phase_model(two), FitError);
  EXPECT_THROW(fit_phase_model(two, -1.0), FitError);
  std::vector<PhasePoint> three = {{0.0, 1, 1.0, 0.0}, {30.0, 1, 0.8, 0.5}, {60.0, 1, 0.5, 0.8}};
  EXPECT_NO_THROW(fit_phase_model(three));
}

}  // namespace
}  // namespace stirap
