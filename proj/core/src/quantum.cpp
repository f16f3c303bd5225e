#include "stirap/quantum.hpp"

#include "stirap/units.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace stirap {

double wrap_degrees(double degrees) {
  double wrapped = std::fmod(degrees, 360.0);
  if (wrapped <= -180.0) wrapped += 360.0;
  if (wrapped > 180.0) wrapped -= 360.0;
  return wrapped;
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Zero: return "0_g";
    case Level::Minus: return "-1_g";
    case Level::Plus: return "+1_g";
    case Level::Excited: return "A_2";
  }
  return "?";
}

StateVector StateVector::basis(Level level) {
  Vector4 v = Vector4::Zero();
  v(index(level)) = 1.0;
  return StateVector(v);
}

DensityMatrix DensityMatrix::basis(Level level) {
  Matrix4 m = Matrix4::Zero();
  m(index(level), index(level)) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(LevelPair pair) {
  Matrix4 m = Matrix4::Zero();
  m(index(pair.a), index(pair.a)) = 0.5;
  m(index(pair.b), index(pair.b)) = 0.5;
  return DensityMatrix(m);
}

double BlochVector::magnitude() const { return std::sqrt(x * x + y * y + z * z); }

double BlochVector::azimuth() const { return std::atan2(y, x); }

DensityMatrix density_from_pure(const StateVector& state) {
  if (std::abs(state.norm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("density_from_pure: state is not normalized");
  }
  const Vector4& psi = state.amplitudes();
  return DensityMatrix(psi * psi.adjoint());
}

BlochVector bloch_of(const DensityMatrix& rho, LevelPair pair) {
  const Complex coherence = rho(pair.a, pair.b);
  BlochVector b;
  b.x = 2.0 * coherence.real();
  b.y = -2.0 * coherence.imag();
  b.z = rho.population(pair.a) - rho.population(pair.b);
  b.pair = pair;
  return b;
}

Matrix4 gate_unitary(const Gate& gate) {
  if (gate.pair.a == Level::Excited || gate.pair.b == Level::Excited) {
    throw std::invalid_argument("microwave gates address ground states only");
  }
  if (gate.pair.a == gate.pair.b) {
    throw std::invalid_argument("gate pair must name two distinct levels");
  }
  Matrix4 u = Matrix4::Identity();
  const int a = index(gate.pair.a);
  const int b = index(gate.pair.b);
  if (gate.kind == GateKind::Pi) {
    // i exp(-i pi n.sigma / 2): the pair phase is chosen so that pi^2 = 1.
    u(a, a) = 0.0;
    u(b, b) = 0.0;
    u(a, b) = std::polar(1.0, -gate.axis_phase);
    u(b, a) = std::polar(1.0, gate.axis_phase);
    return u;
  }
  const double c = std::cos(kPi / 4.0);
  const Complex minus_i(0.0, -1.0);
  u(a, a) = c;
  u(b, b) = c;
  u(a, b) = minus_i * c * std::polar(1.0, -gate.axis_phase);
  u(b, a) = minus_i * c * std::polar(1.0, gate.axis_phase);
  return u;
}

DensityMatrix apply_instant_gate(const DensityMatrix& rho, const Gate& gate) {
  const Matrix4 u = gate_unitary(gate);
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

Diagnostics validate(const Matrix4& rho) {
  Diagnostics d;
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Matrix4 hermitian_part = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(hermitian_part, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  d.trace_violation = d.trace_error > kTraceTolerance;
  d.hermiticity_violation = d.hermiticity_error > kHermiticityTolerance;
  d.positivity_violation = d.min_eigenvalue < kPositivityTolerance;
  return d;
}

}  // namespace stirap
