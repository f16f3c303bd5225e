#pragma once

#include "stirap/quantum.hpp"

#include <limits>
#include <string_view>
#include <vector>

namespace stirap {

/// Which ground-state coherences the phenomenological spin dephasing acts on.
enum class SpinDephasing {
  /// sqrt(1/(2 T_spin)) diag(0, 1, -1, 0): the (-1, +1) coherence decays at
  /// 1/T_spin, |0_g> coherences at 1/(4 T_spin).
  SpinPair,
  /// Adds sqrt(3/(2 T_spin)) |0_g><0_g| so every ground coherence decays at
  /// 1/T_spin.
  AllGround,
};

std::string_view to_string(SpinDephasing model);
SpinDephasing parse_spin_dephasing(std::string_view text);

inline constexpr double kNoDissipation = std::numeric_limits<double>::infinity();

/// Physical constants of the Lambda model. Frequencies in cyclic MHz, times
/// in ns. A time of kNoDissipation removes the corresponding channel.
struct LambdaParams {
  double rabi_mhz = 31.0;                 // peak Omega_-1
  double one_photon_detuning_mhz = 60.0;  // Delta
  double two_photon_detuning_mhz = 0.0;   // delta
  double decay_to_minus_ns = 31.0;
  double decay_to_plus_ns = 24.0;
  double decay_to_zero_ns = 104.0;
  double orbital_dephasing_ns = 7.0;
  double spin_dephasing_ns = 2250.0;
  double rabi_ratio = 1.0;  // Omega_+1 peak / Omega_-1 peak
  SpinDephasing spin_dephasing = SpinDephasing::SpinPair;

  /// Throws std::invalid_argument on non-positive times or negative Rabi
  /// frequency.
  void validate() const;

  /// Copy with every dissipative channel removed.
  LambdaParams without_dissipation() const;

  /// Total radiative decay rate of |A_2> in 1/ns.
  double excited_decay_rate() const;
};

/// Instantaneous optical drive: amplitudes in cyclic MHz, relative phase in
/// radians.
struct DriveSample {
  double omega_minus_mhz = 0.0;
  double omega_plus_mhz = 0.0;
  double phase = 0.0;
};

/// Rotating-frame Hamiltonian in rad/ns:
///   H(-1,A2) = Omega_-1/2, H(+1,A2) = Omega_+1 e^{i phi}/2,
///   H(+1,+1) = delta, H(A2,A2) = Delta.
Matrix4 hamiltonian_at(const LambdaParams& params, const DriveSample& drive);

/// Jump operators in sqrt(1/ns): three radiative decays out of |A_2>, orbital
/// dephasing of |A_2>, and ground-spin dephasing. Channels with infinite time
/// are omitted.
std::vector<Matrix4> lindblad_ops(const LambdaParams& params);

}  // namespace stirap
