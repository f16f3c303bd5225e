#pragma once

#include "stirap/noise.hpp"

#include <optional>
#include <span>

namespace stirap {

/// One readout of the reference-pair projections after a loop of wedge Phi
/// traversed with the given sign (+1 or -1).
struct PhasePoint {
  double wedge_deg = 0.0;
  int sign = 1;
  double x = 0.0;
  double y = 0.0;
};

/// Least-squares fit of x + i y = A exp(i (eta + sign * slope * Phi)).
struct PhaseFit {
  double amplitude = 0.0;
  double eta_deg = 0.0;  // wrapped to (-180, 180]
  double slope = 0.0;    // d gamma / d Phi
  Interval amplitude_ci;
  Interval eta_ci;
  Interval slope_ci;  // degenerate at the fixed value when the slope is fixed
  bool slope_fixed = false;
  bool eta_identifiable = true;
  double rms_residual = 0.0;
  double max_residual = 0.0;
  int points = 0;
};

/// Fits A and eta, and the slope unless `fixed_slope` is given. The slope is
/// profiled over [-3, 3] (a grid scan, then Brent refinement); A and eta are
/// closed-form for each slope. Intervals are 95% Student-t intervals from the
/// Jacobian. Throws FitError with fewer than three distinct wedge angles or
/// too few points for the residual variance.
PhaseFit fit_phase_model(std::span<const PhasePoint> data, std::optional<double> fixed_slope = std::nullopt);

}  // namespace stirap
