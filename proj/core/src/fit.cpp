#include "stirap/fit.hpp"

#include "stirap/errors.hpp"
#include "stirap/units.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

namespace stirap {
namespace {

constexpr double kSlopeRange = 3.0;
constexpr int kScanPoints = 1201;

struct Profile {
  std::span<const PhasePoint> data;

  Complex amplitude(double slope) const {
    Complex sum = 0.0;
    for (const PhasePoint& p : data) {
      const double psi = p.sign * slope * to_radians(p.wedge_deg);
      sum += Complex(p.x, p.y) * std::polar(1.0, -psi);
    }
    return sum / static_cast<double>(data.size());
  }

  double residual(double slope) const {
    const Complex c = amplitude(slope);
    double ss = 0.0;
    for (const PhasePoint& p : data) {
      const Complex model = c * std::polar(1.0, p.sign * slope * to_radians(p.wedge_deg));
      ss += std::norm(Complex(p.x, p.y) - model);
    }
    return ss;
  }
};

}  // namespace

PhaseFit fit_phase_model(std::span<const PhasePoint> data, std::optional<double> fixed_slope) {
  std::set<double> distinct;
  for (const PhasePoint& p : data) {
    if (p.sign != 1 && p.sign != -1) throw FitError("loop sign must be +1 or -1");
    distinct.insert(p.wedge_deg);
  }
  if (distinct.size() < 3) throw FitError("phase fit needs at least three distinct wedge angles");
  const int params = fixed_slope ? 2 : 3;
  const int dof = 2 * static_cast<int>(data.size()) - params;
  if (dof < 1) throw FitError("phase fit has no residual degrees of freedom");

  const Profile profile{data};
  double slope = 0.0;
  if (fixed_slope) {
    slope = *fixed_slope;
  } else {
    double best = std::numeric_limits<double>::infinity();
    const double step = 2.0 * kSlopeRange / (kScanPoints - 1);
    for (int i = 0; i < kScanPoints; ++i) {
      const double k = -kSlopeRange + step * i;
      const double ss = profile.residual(k);
      if (ss < best) {
        best = ss;
        slope = k;
      }
    }
    const auto refined = boost::math::tools::brent_find_minima(
        [&](double k) { return profile.residual(k); }, slope - step, slope + step, 52);
    slope = refined.first;
  }

  const Complex c = profile.amplitude(slope);
  PhaseFit fit;
  fit.points = static_cast<int>(data.size());
  fit.amplitude = std::abs(c);
  fit.eta_deg = wrap_degrees(to_degrees(std::arg(c)));
  fit.slope = slope;
  fit.slope_fixed = fixed_slope.has_value();

  const double eta = std::arg(c);
  Eigen::MatrixXd jac(2 * data.size(), params);
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PhasePoint& p = data[i];
    const double w = p.sign * to_radians(p.wedge_deg);
    const double psi = eta + slope * w;
    const double mx = fit.amplitude * std::cos(psi);
    const double my = fit.amplitude * std::sin(psi);
    const double rx = p.x - mx;
    const double ry = p.y - my;
    ss += rx * rx + ry * ry;
    fit.max_residual = std::max({fit.max_residual, std::abs(rx), std::abs(ry)});
    jac(2 * i, 0) = std::cos(psi);
    jac(2 * i, 1) = -my;
    jac(2 * i + 1, 0) = std::sin(psi);
    jac(2 * i + 1, 1) = mx;
    if (params == 3) {
      jac(2 * i, 2) = -my * w;
      jac(2 * i + 1, 2) = mx * w;
    }
  }
  fit.rms_residual = std::sqrt(ss / (2.0 * data.size()));

  const double variance = ss / dof;
  const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd half = Eigen::VectorXd::Constant(params, inf);
  if (lu.isInvertible()) {
    const Eigen::MatrixXd cov = variance * lu.inverse();
    for (int j = 0; j < params; ++j) half(j) = t * std::sqrt(std::max(cov(j, j), 0.0));
  } else {
    half(0) = t * std::sqrt(variance / std::max(normal(0, 0), 1e-300));
  }

  fit.amplitude_ci = {std::max(0.0, fit.amplitude - half(0)), fit.amplitude + half(0)};
  const double eta_half = to_degrees(half(1));
  fit.eta_ci = {fit.eta_deg - eta_half, fit.eta_deg + eta_half};
  if (params == 3) {
    fit.slope_ci = {slope - half(2), slope + half(2)};
  } else {
    fit.slope_ci = {slope, slope};
  }
  fit.eta_identifiable = fit.amplitude > 1e-12 && fit.amplitude > half(0);
  if (!fit.eta_identifiable) {
    fit.eta_ci = {-180.0, 180.0};
    if (params == 3) fit.slope_ci = {-inf, inf};
  }
  return fit;
}

}  // namespace stirap
