#pragma once

#include "stirap/lambda_model.hpp"
#include "stirap/protocol.hpp"
#include "stirap/pulse.hpp"
#include "stirap/quantum.hpp"

#include <span>
#include <vector>

namespace stirap {

/// cos(theta/2)|-1_g> - sin(theta/2) e^{i phi}|+1_g>.
StateVector dark_state(double theta, double phi);

/// Berry phase in degrees, -sum of sin^2(theta/2) dphi by the trapezoid rule.
/// Phase steps at the poles carry their exact weight (0 or 1). Throws
/// std::invalid_argument if the path is not closed.
double berry_integral(std::span<const ScheduleSample> path);
double berry_integral(const PulseSchedule& schedule);

/// Sum of the loop Berry phases of a protocol, in degrees, unwrapped.
double berry_integral(const ProtocolSchedule& protocol);

/// Phase of |-1_g> relative to |0_g> expected after the protocol in the
/// adiabatic limit, in degrees and unwrapped. Loops add their Berry phase;
/// a pi pulse about axis alpha on (0_g, -1_g) maps chi to 2 alpha - chi.
/// Throws std::invalid_argument for protocols containing holds or pi/2
/// pulses.
double adiabatic_readout_phase(const ProtocolSchedule& protocol);

struct StarkResult {
  double sigma_eta_mhz = 0.0;
  double slope = 0.0;  // Sigma_eta / delta
};

/// Time average of sin^2(theta/2) over the loop.
double stark_slope(const PulseSchedule& schedule);

/// First-order dark-state energy shift at two-photon detuning delta.
StarkResult stark_prediction(const PulseSchedule& schedule, double delta_mhz);

/// Phase standard deviation in degrees for OU phase noise of amplitude
/// s_phi (degrees) and bandwidth dnu (MHz) on a loop of duration tau (ns).
double phase_noise_sigma(double s_phi_deg, double bandwidth_mhz, double tau_ns);

/// Large dnu*tau limit s_phi sqrt(pi / (2 dnu tau)).
double phase_noise_asymptote(double s_phi_deg, double bandwidth_mhz, double tau_ns);

struct AdiabaticitySeries {
  std::vector<double> times;  // ns
  std::vector<double> ratio;  // |dtheta/dt| / gap
};

/// |dtheta/dt| divided by the smallest energy gap between the dark eigenstate
/// and the other eigenstates of the (-1_g, +1_g, A_2) block, on the schedule
/// grid.
AdiabaticitySeries adiabaticity_metric(const PulseSchedule& schedule, const LambdaParams& params);

}  // namespace stirap
