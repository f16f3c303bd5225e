#pragma once

#include <Eigen/Core>

#include <complex>
#include <string_view>

namespace stirap {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

/// Levels of the NV-center Lambda system. The numeric value is the row/column
/// index used by every matrix in the library.
enum class Level : int { Zero = 0, Minus = 1, Plus = 2, Excited = 3 };

inline constexpr int index(Level level) { return static_cast<int>(level); }

std::string_view to_string(Level level);

/// Ordered pair of levels defining a two-level subspace. The first level is
/// the "up" (+z) state of the pair's Bloch sphere.
struct LevelPair {
  Level a;
  Level b;

  friend bool operator==(const LevelPair&, const LevelPair&) = default;
};

inline constexpr LevelPair kSpinPair{Level::Minus, Level::Plus};
inline constexpr LevelPair kReferencePair{Level::Zero, Level::Minus};

/// Basis ordering header written into every serialized output.
inline constexpr std::string_view kBasisOrderNote = "basis order: |0_g>, |-1_g>, |+1_g>, |A_2>";

class StateVector {
 public:
  StateVector() : amplitudes_(Vector4::Zero()) {}
  explicit StateVector(const Vector4& amplitudes) : amplitudes_(amplitudes) {}

  static StateVector basis(Level level);

  const Vector4& amplitudes() const { return amplitudes_; }
  Complex operator[](Level level) const { return amplitudes_(index(level)); }
  double norm() const { return amplitudes_.norm(); }

 private:
  Vector4 amplitudes_;
};

/// 4x4 density matrix. Construction does not enforce the physical
/// invariants; use validate() to check them.
class DensityMatrix {
 public:
  DensityMatrix() : rho_(Matrix4::Zero()) {}
  explicit DensityMatrix(const Matrix4& rho) : rho_(rho) {}

  static DensityMatrix basis(Level level);
  static DensityMatrix maximally_mixed(LevelPair pair);

  const Matrix4& matrix() const { return rho_; }
  Complex operator()(Level row, Level col) const { return rho_(index(row), index(col)); }
  double population(Level level) const { return rho_(index(level), index(level)).real(); }
  double trace() const { return rho_.trace().real(); }

 private:
  Matrix4 rho_;
};

/// Bloch vector of a two-level subspace: x = 2 Re rho_ab, y = -2 Im rho_ab,
/// z = rho_aa - rho_bb, so that the azimuth is the phase of |b> relative to
/// |a>.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  LevelPair pair = kSpinPair;

  double magnitude() const;
  /// Azimuth atan2(y, x) in radians.
  double azimuth() const;
};

enum class GateKind { Pi, HalfPi };

/// Ideal instantaneous microwave rotation on a ground-state pair about the
/// equatorial axis (cos(axis_phase), sin(axis_phase), 0). Pi gates carry an
/// extra factor i on the pair so that applying one twice is the identity.
struct Gate {
  GateKind kind = GateKind::Pi;
  double axis_phase = 0.0;  // radians
  LevelPair pair = kReferencePair;
};

struct Diagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  bool trace_violation = false;
  bool hermiticity_violation = false;
  bool positivity_violation = false;

  bool ok() const { return !trace_violation && !hermiticity_violation && !positivity_violation; }
};

inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kPositivityTolerance = -1e-6;
inline constexpr double kNormTolerance = 1e-6;

/// |psi><psi|. Throws std::invalid_argument if the norm deviates from one by
/// more than kNormTolerance.
DensityMatrix density_from_pure(const StateVector& state);

BlochVector bloch_of(const DensityMatrix& rho, LevelPair pair);

/// Unitary for `gate`, identity outside its pair. Throws
/// std::invalid_argument if the pair touches |A_2> or is degenerate.
Matrix4 gate_unitary(const Gate& gate);

DensityMatrix apply_instant_gate(const DensityMatrix& rho, const Gate& gate);

Diagnostics validate(const Matrix4& rho);
inline Diagnostics validate(const DensityMatrix& rho) { return validate(rho.matrix()); }

}  // namespace stirap
