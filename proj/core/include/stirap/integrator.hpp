#pragma once

#include "stirap/lambda_model.hpp"
#include "stirap/protocol.hpp"
#include "stirap/quantum.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace stirap {

struct PropagationOptions {
  /// Step-halving acceptance threshold on every density-matrix entry at the
  /// recorded times. Must lie in [1e-12, 1e-6].
  double tol = 1e-6;
  /// RK4 substeps per schedule grid step. 0 selects them automatically by
  /// repeated halving until the tolerance is met.
  int substeps = 0;
  double record_every_ns = 4.0;
  bool keep_states = true;
  int max_refinements = 8;
};

struct PropagationDiagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  int substeps = 0;
  double smallest_step_ns = 0.0;
  /// Max entry change between the accepted run and the run with twice the
  /// step; negative when substeps were fixed by the caller.
  double convergence_delta = -1.0;
};

struct Trajectory {
  std::vector<double> times;  // ns
  std::vector<DensityMatrix> states;
  std::vector<BlochVector> bloch_spin;
  std::array<std::vector<double>, 4> populations;  // indexed by Level
  std::vector<double> pl_rate;                     // photons / ns
  DensityMatrix final_state;
  /// Time integral of pl_rate on the integration grid.
  double emitted_photons = 0.0;
  PropagationDiagnostics diagnostics;
};

/// Fixed-step RK4 integration of the Lindblad equation through the protocol.
/// Gates act instantaneously between segments. The trace is not
/// renormalized. Throws std::invalid_argument on a bad tolerance or initial
/// state, NumericalError if step halving does not converge or a recorded
/// state violates the quantum-core tolerances.
Trajectory propagate(const DensityMatrix& rho0, const ProtocolSchedule& protocol,
                     const LambdaParams& params, const PropagationOptions& options = {});

/// Gamma_tot * rho_{A2,A2} at each recorded time.
std::vector<double> pl_series(const Trajectory& trajectory, const LambdaParams& params);

/// CSV with columns t_ns, p_zero, p_minus, p_plus, p_excited, bloch_x,
/// bloch_y, bloch_z, bloch_norm, pl_rate_per_ns.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace stirap
