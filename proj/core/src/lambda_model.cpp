#include "stirap/lambda_model.hpp"

#include "stirap/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stirap {

std::string_view to_string(SpinDephasing model) {
  return model == SpinDephasing::SpinPair ? "spin-pair" : "all-ground";
}

SpinDephasing parse_spin_dephasing(std::string_view text) {
  if (text == "spin-pair") return SpinDephasing::SpinPair;
  if (text == "all-ground") return SpinDephasing::AllGround;
  throw std::invalid_argument("unknown spin dephasing model: " + std::string(text));
}

void LambdaParams::validate() const {
  if (!(rabi_mhz >= 0.0)) throw std::invalid_argument("rabi_mhz must be >= 0");
  if (!(rabi_ratio > 0.0)) throw std::invalid_argument("rabi_ratio must be > 0");
  for (double t : {decay_to_minus_ns, decay_to_plus_ns, decay_to_zero_ns, orbital_dephasing_ns,
                   spin_dephasing_ns}) {
    if (!(t > 0.0)) throw std::invalid_argument("relaxation times must be > 0");
  }
  if (!std::isfinite(one_photon_detuning_mhz) || !std::isfinite(two_photon_detuning_mhz)) {
    throw std::invalid_argument("detunings must be finite");
  }
}

LambdaParams LambdaParams::without_dissipation() const {
  LambdaParams p = *this;
  p.decay_to_minus_ns = kNoDissipation;
  p.decay_to_plus_ns = kNoDissipation;
  p.decay_to_zero_ns = kNoDissipation;
  p.orbital_dephasing_ns = kNoDissipation;
  p.spin_dephasing_ns = kNoDissipation;
  return p;
}

double LambdaParams::excited_decay_rate() const {
  return 1.0 / decay_to_minus_ns + 1.0 / decay_to_plus_ns + 1.0 / decay_to_zero_ns;
}

Matrix4 hamiltonian_at(const LambdaParams& params, const DriveSample& drive) {
  constexpr int kMinus = index(Level::Minus);
  constexpr int kPlus = index(Level::Plus);
  constexpr int kExcited = index(Level::Excited);

  Matrix4 h = Matrix4::Zero();
  const double half_minus = 0.5 * angular(drive.omega_minus_mhz);
  const Complex half_plus = 0.5 * angular(drive.omega_plus_mhz) * std::polar(1.0, drive.phase);
  h(kMinus, kExcited) = half_minus;
  h(kExcited, kMinus) = half_minus;
  h(kPlus, kExcited) = half_plus;
  h(kExcited, kPlus) = std::conj(half_plus);
  h(kPlus, kPlus) = angular(params.two_photon_detuning_mhz);
  h(kExcited, kExcited) = angular(params.one_photon_detuning_mhz);
  return h;
}

namespace {

Matrix4 transition(Level to, Level from) {
  Matrix4 m = Matrix4::Zero();
  m(index(to), index(from)) = 1.0;
  return m;
}

}  // namespace

std::vector<Matrix4> lindblad_ops(const LambdaParams& params) {
  std::vector<Matrix4> ops;
  const auto add_decay = [&](double time_ns, Level target) {
    if (std::isfinite(time_ns)) ops.push_back(std::sqrt(1.0 / time_ns) * transition(target, Level::Excited));
  };
  add_decay(params.decay_to_minus_ns, Level::Minus);
  add_decay(params.decay_to_plus_ns, Level::Plus);
  add_decay(params.decay_to_zero_ns, Level::Zero);

  // Coherences between |A_2> and the ground states decay at 1/T_orb.
  if (std::isfinite(params.orbital_dephasing_ns)) {
    ops.push_back(std::sqrt(2.0 / params.orbital_dephasing_ns) *
                  transition(Level::Excited, Level::Excited));
  }

  if (std::isfinite(params.spin_dephasing_ns)) {
    Matrix4 spin = Matrix4::Zero();
    spin(index(Level::Minus), index(Level::Minus)) = 1.0;
    spin(index(Level::Plus), index(Level::Plus)) = -1.0;
    ops.push_back(std::sqrt(1.0 / (2.0 * params.spin_dephasing_ns)) * spin);
    if (params.spin_dephasing == SpinDephasing::AllGround) {
      ops.push_back(std::sqrt(3.0 / (2.0 * params.spin_dephasing_ns)) *
                    transition(Level::Zero, Level::Zero));
    }
  }
  return ops;
}

}  // namespace stirap
