#include "stirap/geometry.hpp"
#include "stirap/quantum.hpp"
#include "stirap/units.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace stirap {
namespace {

Matrix4 diag(double a, double b, double c, double d) {
  return Eigen::Vector4cd(a, b, c, d).asDiagonal();
}

TEST(Gate, PiSwapsReferencePopulations) {
  const DensityMatrix out = apply_instant_gate(DensityMatrix::basis(Level::Zero), Gate{GateKind::Pi, 0.0});
  EXPECT_TRUE(out.matrix().isApprox(diag(0, 1, 0, 0), 1e-14));
}

TEST(Gate, PiTwiceRestoresState) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix rho = test::random_state(rng);
    const Gate pi{GateKind::Pi, 0.3 * k};
    const DensityMatrix back = apply_instant_gate(apply_instant_gate(rho, pi), pi);
    EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Gate, PiAboutXNegatesReferenceCoherencePhase) {
  // Independent 2x2 oracle: sigma_x rho sigma_x on the pair.
  const double xi = 0.7;
  Matrix4 rho = Matrix4::Zero();
  rho(0, 0) = rho(1, 1) = 0.5;
  rho(0, 1) = 0.5 * std::polar(1.0, xi);
  rho(1, 0) = std::conj(rho(0, 1));
  const DensityMatrix out = apply_instant_gate(DensityMatrix(rho), Gate{GateKind::Pi, 0.0});
  Eigen::Matrix2cd r2 = rho.topLeftCorner<2, 2>();
  Eigen::Matrix2cd sx;
  sx << 0, 1, 1, 0;
  const Eigen::Matrix2cd expected = sx * r2 * sx;
  EXPECT_LT((out.matrix().topLeftCorner<2, 2>() - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(std::arg(out(Level::Zero, Level::Minus)), -xi, 1e-14);
}

TEST(Gate, PreservesTraceHermiticityAndSpectrum) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  const LevelPair pairs[] = {kReferencePair, kSpinPair, {Level::Zero, Level::Plus}};
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix rho = test::random_state(rng);
    const Gate g{k % 2 ? GateKind::Pi : GateKind::HalfPi, phase(rng), pairs[k % 3]};
    const Matrix4 u = gate_unitary(g);
    EXPECT_LT((u * u.adjoint() - Matrix4::Identity()).norm(), 1e-14);
    const DensityMatrix out = apply_instant_gate(rho, g);
    EXPECT_NEAR(out.trace(), 1.0, 1e-10);
    EXPECT_LT((out.matrix() - out.matrix().adjoint()).norm(), 1e-10);
    EXPECT_LT((test::eigenvalues(out.matrix()) - test::eigenvalues(rho.matrix())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Gate, IdentityOutsidePair) {
  const Matrix4 u = gate_unitary(Gate{GateKind::HalfPi, 0.4, kReferencePair});
  EXPECT_EQ(u(2, 2), Complex(1.0));
  EXPECT_EQ(u(3, 3), Complex(1.0));
  EXPECT_EQ(u(0, 2), Complex(0.0));
}

TEST(Gate, RejectsExcitedLevel) {
  EXPECT_THROW(gate_unitary(Gate{GateKind::Pi, 0.0, {Level::Minus, Level::Excited}}), std::invalid_argument);
  EXPECT_THROW(gate_unitary(Gate{GateKind::Pi, 0.0, {Level::Minus, Level::Minus}}), std::invalid_argument);
}

TEST(Validate, CleanStatePasses) {
  std::mt19937_64 rng(3);
  EXPECT_TRUE(validate(test::random_state(rng)).ok());
}

TEST(Validate, FlagsTraceError) {
  const Diagnostics d = validate(diag(0.51, 0.5, 0, 0));
  EXPECT_TRUE(d.trace_violation);
  EXPECT_FALSE(d.positivity_violation);
}

TEST(Validate, FlagsNegativeEigenvalue) {
  const Diagnostics d = validate(diag(1.01, -0.01, 0, 0));
  EXPECT_TRUE(d.positivity_violation);
  EXPECT_NEAR(d.min_eigenvalue, -0.01, 1e-14);
}

TEST(Validate, FlagsNonHermitian) {
  Matrix4 m = diag(1, 0, 0, 0);
  m(0, 1) = 1e-3;
  EXPECT_TRUE(validate(m).hermiticity_violation);
}

TEST(DensityFromPure, RejectsUnnormalizedState) {
  EXPECT_THROW(density_from_pure(StateVector(Vector4(1.0, 1.0, 0.0, 0.0))), std::invalid_argument);
}

TEST(Bloch, LinearInRho) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix a = test::random_state(rng);
    const DensityMatrix b = test::random_state(rng);
    const double w = 0.3;
    const BlochVector ba = bloch_of(a, kSpinPair);
    const BlochVector bb = bloch_of(b, kSpinPair);
    const BlochVector mix = bloch_of(DensityMatrix(w * a.matrix() + (1 - w) * b.matrix()), kSpinPair);
    EXPECT_NEAR(mix.x, w * ba.x + (1 - w) * bb.x, 1e-14);
    EXPECT_NEAR(mix.y, w * ba.y + (1 - w) * bb.y, 1e-14);
    EXPECT_NEAR(mix.z, w * ba.z + (1 - w) * bb.z, 1e-14);
  }
}

TEST(Bloch, DarkStateMapsToAntipodalSphere) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> th(0.0, kPi);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int k = 0; k < 200; ++k) {
    const double theta = th(rng);
    const double phi = ph(rng);
    const BlochVector b = bloch_of(density_from_pure(dark_state(theta, phi)), kSpinPair);
    EXPECT_NEAR(b.x, -std::sin(theta) * std::cos(phi), 1e-14);
    EXPECT_NEAR(b.y, -std::sin(theta) * std::sin(phi), 1e-14);
    EXPECT_NEAR(b.z, std::cos(theta), 1e-14);
  }
}

TEST(Bloch, EquatorialExample) {
  const BlochVector b = bloch_of(density_from_pure(dark_state(kPi / 2, 0.0)), kSpinPair);
  EXPECT_NEAR(b.x, -1.0, 1e-15);
  EXPECT_NEAR(b.y, 0.0, 1e-15);
  EXPECT_NEAR(b.z, 0.0, 1e-15);
  EXPECT_NEAR(b.magnitude(), 1.0, 1e-15);
}

TEST(Bloch, AzimuthIsRelativePhaseOfSecondLevel) {
  const double xi = 1.1;
  const StateVector s(Vector4(1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), xi), 0.0, 0.0));
  EXPECT_NEAR(bloch_of(density_from_pure(s), kReferencePair).azimuth(), xi, 1e-14);
}

TEST(Units, WrapDegrees) {
  EXPECT_DOUBLE_EQ(wrap_degrees(180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(190.0), -170.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-720.0 + 30.0), 30.0);
}

}  // namespace
}  // namespace stirap
