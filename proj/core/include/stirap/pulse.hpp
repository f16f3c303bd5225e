#pragma once

#include "stirap/lambda_model.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace stirap {

enum class PulseShape {
  /// EOM modulation depth beta ramped by a half-cosine between the first
  /// zero of J0 and 0; Omega_-1 follows the carrier J0(beta) and Omega_+1 the
  /// first sideband J1(beta).
  EomBessel,
  /// theta = pi sin^2(pi r / 2) on each half-loop ramp.
  SineRamp,
  /// theta linear in time on each ramp; dwell 1 is the instantaneous-transfer
  /// limit, dwell 0 a constant polar velocity.
  SquareDwell,
};

std::string_view to_string(PulseShape shape);
PulseShape parse_shape(std::string_view text);

/// First zero of J0.
inline constexpr double kBesselZero = 2.404825557695773;

/// Pole dwell of the default eom-bessel loop, chosen so that the time average
/// of sin^2(theta/2) over the loop is 0.55.
inline constexpr double kCalibratedDwell = 0.07075170461970506;

inline constexpr std::size_t kDefaultSteps = 4096;

struct HarmonicAmplitudes {
  double carrier = 0.0;   // drives Omega_-1
  double sideband = 0.0;  // drives Omega_+1
};

/// Raw EOM harmonic amplitudes (|J0(beta)|, |J1(beta)|).
HarmonicAmplitudes eom_harmonics(double beta);

/// Relative amplitudes (|J0(beta)|, |J1(beta)| / J1(kBesselZero)), so that
/// each field reaches 1 at its own pole. beta must lie in [0, kBesselZero].
HarmonicAmplitudes eom_bessel_map(double beta);

enum class LoopSign { Positive, Negative };

struct LoopSpec {
  double tau_ns = 1200.0;
  double wedge_deg = 120.0;
  PulseShape shape = PulseShape::EomBessel;
  double dwell_fraction = kCalibratedDwell;
  std::size_t steps = kDefaultSteps;
};

/// Loop geometry at one instant.
struct SchedulePoint {
  double theta = 0.0;     // radians, in [0, pi]
  double phi = 0.0;       // radians
  double envelope = 1.0;  // total relative amplitude
};

/// Grid sample used by quadratures. Phase jumps appear as two samples with
/// the same time and grid index.
struct ScheduleSample {
  double t = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double envelope = 1.0;
  std::size_t grid = 0;
};

/// One tangerine-slice loop: out from |-1_g> to |+1_g> along phi = 0, a phase
/// step of the wedge angle at |+1_g>, back along phi = wedge, and the closing
/// step of -wedge at |-1_g>. Immutable; noise and reversal produce new
/// schedules.
class PulseSchedule {
 public:
  const LoopSpec& spec() const { return spec_; }
  double duration() const { return spec_.tau_ns; }
  std::size_t steps() const { return spec_.steps; }
  double dt() const { return spec_.tau_ns / static_cast<double>(spec_.steps); }
  double wedge() const;  // radians
  bool is_reversed() const { return reversed_; }
  bool is_noisy() const { return !dtheta_.empty(); }

  /// Geometry at time t on the given half of the loop. The half matters only
  /// exactly at t = tau/2, where the phase steps.
  SchedulePoint at(double t, bool inbound) const;
  SchedulePoint at(double t) const { return at(t, t > 0.5 * duration()); }

  std::vector<ScheduleSample> samples() const;

  /// The same path traversed backwards in time.
  PulseSchedule reversed() const;

  /// Noise values in radians on grid samples 0..steps, forward time.
  std::span<const double> theta_noise() const { return dtheta_; }
  std::span<const double> phi_noise() const { return dphi_; }

 private:
  friend PulseSchedule tangerine(const LoopSpec& spec);
  friend PulseSchedule inject_noise(const PulseSchedule& schedule,
                                    std::span<const double> dtheta_deg,
                                    std::span<const double> dphi_deg);

  explicit PulseSchedule(const LoopSpec& spec) : spec_(spec) {}

  SchedulePoint forward_at(double t, bool inbound) const;
  double noise_at(const std::vector<double>& values, double t) const;
  std::size_t pole_index(double t) const;

  LoopSpec spec_;
  bool reversed_ = false;
  std::vector<double> dtheta_;
  std::vector<double> dphi_;
};

/// Builds a loop. Throws std::invalid_argument if tau <= 0, the wedge is
/// outside [-360, 360] degrees, dwell is outside [0, 1], or steps is odd or
/// below 1000.
PulseSchedule tangerine(const LoopSpec& spec);
PulseSchedule tangerine(double tau_ns, double wedge_deg, PulseShape shape, double dwell_fraction,
                        std::size_t steps = kDefaultSteps);

/// Returns the schedule with theta' = clamp(theta + dtheta, 0, pi) and
/// phi' = phi + dphi. The pole samples at t = 0, tau/2, tau keep their exact
/// values. Traces are in degrees and must hold steps + 1 samples (or be
/// empty for no noise); throws std::invalid_argument otherwise.
PulseSchedule inject_noise(const PulseSchedule& schedule, std::span<const double> dtheta_deg,
                           std::span<const double> dphi_deg);

/// Rabi frequencies for one loop point:
///   Omega_-1 = Omega_R e sin(theta/2),  Omega_+1 = ratio Omega_R e cos(theta/2).
DriveSample drive_from_point(const SchedulePoint& point, const LambdaParams& params);

DriveSample drive_of(const PulseSchedule& schedule, const LambdaParams& params, double t, bool inbound);
inline DriveSample drive_of(const PulseSchedule& schedule, const LambdaParams& params, double t) {
  return drive_of(schedule, params, t, t > 0.5 * schedule.duration());
}

/// CSV with columns t_ns, theta_deg, phi_deg, omega_minus_mhz, omega_plus_mhz.
void write_schedule_csv(std::ostream& out, const PulseSchedule& schedule, const LambdaParams& params);

}  // namespace stirap
