#include "stirap/errors.hpp"
#include "stirap/integrator.hpp"
#include "stirap/protocol.hpp"
#include "stirap/pulse.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stirap {
namespace {

ProtocolSchedule idle(double ns) { return ProtocolSchedule({HoldSegment{ns, DriveSample{}}}, false); }

TEST(Propagate, ZeroHamiltonianKeepsState) {
  LambdaParams p = LambdaParams{}.without_dissipation();
  p.one_photon_detuning_mhz = 0.0;
  std::mt19937_64 rng(2);
  const DensityMatrix rho = test::random_state(rng);
  const Trajectory t = propagate(rho, idle(100.0), p, {});
  for (const DensityMatrix& s : t.states) EXPECT_LT((s.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Propagate, ExcitedDecayMatchesRateEquations) {
  const LambdaParams p;
  PropagationOptions o;
  o.record_every_ns = 1.0;
  const Trajectory t = propagate(DensityMatrix::basis(Level::Excited), idle(200.0), p, o);
  const double gamma = 1.0 / 31 + 1.0 / 24 + 1.0 / 104;
  const double branch[3] = {1.0 / 104 / gamma, 1.0 / 31 / gamma, 1.0 / 24 / gamma};
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    const double left = std::exp(-gamma * t.times[i]);
    EXPECT_NEAR(t.populations[3][i], left, 1e-9);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(t.populations[k][i], branch[k] * (1.0 - left), 1e-9);
  }
  EXPECT_NEAR(1.0 / gamma, 11.97, 0.01);
}

TEST(Propagate, PureDecayEmitsOnePhoton) {
  const Trajectory t = propagate(DensityMatrix::basis(Level::Excited), idle(400.0), LambdaParams{}, {});
  // Trapezoid rule on the 0.25 ns hold grid: relative error below (h Gamma)^2 / 12.
  const double h_gamma = 0.25 * LambdaParams{}.excited_decay_rate();
  EXPECT_NEAR(t.emitted_photons, 1.0, h_gamma * h_gamma / 12.0);
  for (double r : t.pl_rate) EXPECT_GE(r, 0.0);
}

TEST(Propagate, NoExcitedPopulationMeansNoLight) {
  const Trajectory t = propagate(DensityMatrix::basis(Level::Zero), idle(50.0), LambdaParams{}, {});
  for (double r : t.pl_rate) EXPECT_EQ(r, 0.0);
  EXPECT_EQ(t.emitted_photons, 0.0);
}

TEST(Propagate, PlSeriesIsTotalRateTimesExcitedPopulation) {
  const LambdaParams p;
  const Trajectory t = propagate(DensityMatrix::basis(Level::Excited), idle(30.0), p, {});
  const auto pl = pl_series(t, p);
  ASSERT_EQ(pl.size(), t.times.size());
  for (std::size_t i = 0; i < pl.size(); ++i) {
    EXPECT_NEAR(pl[i], p.excited_decay_rate() * t.populations[3][i], 1e-15);
    EXPECT_NEAR(pl[i], t.pl_rate[i], 1e-15);
  }
}

TEST(Propagate, SlowUnitaryLoopFollowsDarkState) {
  LambdaParams p = LambdaParams{}.without_dissipation();
  p.rabi_mhz = 64.0;
  const PulseSchedule loop = tangerine(5000.0, 120.0, PulseShape::EomBessel, kCalibratedDwell);
  const Trajectory t = propagate(DensityMatrix::basis(Level::Minus), repeated_loops(loop, 1, LoopSign::Positive), p, {});
  EXPECT_GE(t.bloch_spin.back().magnitude(), 0.999);
}

TEST(Propagate, DissipativeLoopKeepsInvariants) {
  const PulseSchedule loop = tangerine(1200.0, 120.0, PulseShape::EomBessel, kCalibratedDwell);
  const Trajectory t =
      propagate(DensityMatrix::basis(Level::Minus), repeated_loops(loop, 2, LoopSign::Positive), LambdaParams{}, {});
  EXPECT_LE(t.diagnostics.max_trace_error, 1e-8);
  EXPECT_GE(t.diagnostics.min_eigenvalue, -1e-6);
  EXPECT_LE(t.diagnostics.convergence_delta, 1e-6);
  EXPECT_GE(t.diagnostics.substeps, 1);
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += t.populations[k][i];
    EXPECT_NEAR(sum, 1.0, 1e-8);
  }
  EXPECT_DOUBLE_EQ(t.times.back(), 2400.0);
}

TEST(Propagate, StepHalvingChangesLittle) {
  const PulseSchedule loop = tangerine(1200.0, 120.0, PulseShape::EomBessel, kCalibratedDwell);
  const ProtocolSchedule protocol = repeated_loops(loop, 1, LoopSign::Positive);
  const Trajectory a = propagate(prepared_reference_state(), protocol, LambdaParams{}, {});
  PropagationOptions fine;
  fine.substeps = 2 * a.diagnostics.substeps;
  const Trajectory b = propagate(prepared_reference_state(), protocol, LambdaParams{}, fine);
  EXPECT_LT((a.final_state.matrix() - b.final_state.matrix()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(b.diagnostics.convergence_delta, 0.0);
}

TEST(Propagate, GateActsBetweenSegments) {
  const ProtocolSchedule p({GateSegment{Gate{GateKind::Pi, 0.0}}}, false);
  const Trajectory t = propagate(DensityMatrix::basis(Level::Zero), p, LambdaParams{}, {});
  EXPECT_NEAR(t.final_state.population(Level::Minus), 1.0, 1e-15);
}

TEST(Propagate, RecordStrideAndStateRetention) {
  PropagationOptions o;
  o.record_every_ns = 10.0;
  o.keep_states = false;
  const Trajectory t = propagate(DensityMatrix::basis(Level::Excited), idle(100.0), LambdaParams{}, o);
  EXPECT_TRUE(t.states.empty());
  EXPECT_EQ(t.times.size(), 11u);
  EXPECT_DOUBLE_EQ(t.times[5], 50.0);
}

TEST(Propagate, RejectsBadOptions) {
  PropagationOptions o;
  o.tol = 1e-3;
  EXPECT_THROW(propagate(DensityMatrix::basis(Level::Zero), idle(1.0), LambdaParams{}, o), std::invalid_argument);
  EXPECT_THROW(propagate(DensityMatrix(), idle(1.0), LambdaParams{}, {}), std::invalid_argument);
}

TEST(Propagate, UnstableFixedStepRaisesNumericalError) {
  LambdaParams p;
  p.rabi_mhz = 1e5;
  PropagationOptions o;
  o.substeps = 1;
  const PulseSchedule loop = tangerine(1200.0, 120.0, PulseShape::EomBessel, kCalibratedDwell);
  EXPECT_THROW(propagate(DensityMatrix::basis(Level::Minus), repeated_loops(loop, 1, LoopSign::Positive), p, o),
               NumericalError);
}

TEST(TrajectoryCsv, Columns) {
  std::ostringstream out;
  write_trajectory_csv(out, propagate(DensityMatrix::basis(Level::Excited), idle(8.0), LambdaParams{}, {}));
  EXPECT_NE(out.str().find("t_ns,p_zero,p_minus,p_plus,p_excited,bloch_x,bloch_y,bloch_z,bloch_norm,pl_rate_per_ns"),
            std::string::npos);
}

}  // namespace
}  // namespace stirap
