#include "stirap/integrator.hpp"

#include "stirap/errors.hpp"
#include "stirap/units.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <variant>

namespace stirap {
namespace {

// Grid spacing used to discretize hold segments before substepping.
constexpr double kHoldGridNs = 0.25;

// Largest h * |rate| at which the first automatic attempt starts.
constexpr double kInitialStepScale = 0.25;

class Liouvillian {
 public:
  explicit Liouvillian(const LambdaParams& params) : params_(params) {
    loss_ = Matrix4::Zero();
    dephasing_ = Matrix4::Zero();
    for (const Matrix4& l : lindblad_ops(params)) {
      loss_ += l.adjoint() * l;
      classify(l);
    }
    loss_ *= Complex(0.0, -0.5);
  }

  Matrix4 effective_hamiltonian(const DriveSample& drive) const {
    return hamiltonian_at(params_, drive) + loss_;
  }

  Matrix4 derivative(const Matrix4& heff, const Matrix4& rho) const {
    const Complex minus_i(0.0, -1.0);
    // rho is Hermitian, so rho * heff^dagger = (heff * rho)^dagger.
    const Matrix4 a = heff * rho;
    Matrix4 d = minus_i * (a - a.adjoint());
    d += dephasing_.cwiseProduct(rho);
    for (const Transfer& t : transfers_) d(t.to, t.to) += t.rate * rho(t.from, t.from);
    for (const Matrix4& l : general_) d.noalias() += l * rho * l.adjoint();
    return d;
  }

 private:
  // |c|^2 rho_jj |i><i| for L = c |i><j|.
  struct Transfer {
    int to;
    int from;
    double rate;
  };

  // Diagonal operators fold into one elementwise factor d_a conj(d_b); single
  // entries become population transfers; anything else stays a full product.
  void classify(const Matrix4& l) {
    int nonzero = 0;
    int row = 0;
    int col = 0;
    bool diagonal = true;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (l(i, j) == Complex(0.0)) continue;
        ++nonzero;
        row = i;
        col = j;
        diagonal = diagonal && i == j;
      }
    }
    if (nonzero == 1 && row != col) {
      transfers_.push_back({row, col, std::norm(l(row, col))});
    } else if (diagonal) {
      const Vector4 d = l.diagonal();
      dephasing_ += d * d.adjoint();
    } else {
      general_.push_back(l);
    }
  }

  LambdaParams params_;
  Matrix4 loss_;
  Matrix4 dephasing_;
  std::vector<Transfer> transfers_;
  std::vector<Matrix4> general_;
};

struct Recorder {
  std::vector<double> times;
  std::vector<Matrix4> states;

  void record(double t, const Matrix4& rho) {
    times.push_back(t);
    states.push_back(rho);
  }
};

struct RunResult {
  Recorder recorder;
  Matrix4 final_state;
  double photons = 0.0;
  double smallest_step = 0.0;
};

template <typename DriveAt>
void integrate_span(const Liouvillian& liouvillian, DriveAt&& drive_at, double t0, double t1,
                    int substeps, Matrix4& rho, double gamma_tot, double& photons) {
  const double h = (t1 - t0) / substeps;
  for (int j = 0; j < substeps; ++j) {
    const double ta = t0 + j * h;
    const double tb = j + 1 == substeps ? t1 : ta + h;
    const Matrix4 h0 = liouvillian.effective_hamiltonian(drive_at(ta));
    const Matrix4 hm = liouvillian.effective_hamiltonian(drive_at(0.5 * (ta + tb)));
    const Matrix4 h1 = liouvillian.effective_hamiltonian(drive_at(tb));

    const double before = rho(3, 3).real();
    const Matrix4 k1 = liouvillian.derivative(h0, rho);
    const Matrix4 k2 = liouvillian.derivative(hm, rho + (0.5 * h) * k1);
    const Matrix4 k3 = liouvillian.derivative(hm, rho + (0.5 * h) * k2);
    const Matrix4 k4 = liouvillian.derivative(h1, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    photons += 0.5 * h * gamma_tot * (before + rho(3, 3).real());
  }
}

double max_rate(const LambdaParams& params) {
  const double drive = angular(std::abs(params.one_photon_detuning_mhz) +
                               std::abs(params.two_photon_detuning_mhz) +
                               params.rabi_mhz * (1.0 + params.rabi_ratio));
  double decay = 0.0;
  for (const Matrix4& l : lindblad_ops(params)) decay += (l.adjoint() * l).trace().real();
  return drive + decay;
}

double grid_step(const ProtocolSchedule& protocol) {
  double step = kHoldGridNs;
  for (const Segment& s : protocol.segments()) {
    if (const auto* loop = std::get_if<LoopSegment>(&s)) step = std::max(step, loop->schedule.dt());
  }
  return step;
}

RunResult run(const Matrix4& rho0, const ProtocolSchedule& protocol, const LambdaParams& params,
              const Liouvillian& liouvillian, int substeps, double record_every_ns) {
  RunResult out;
  Matrix4 rho = rho0;
  const double gamma_tot = params.excited_decay_rate();
  double offset = 0.0;
  out.smallest_step = std::numeric_limits<double>::infinity();
  out.recorder.record(0.0, rho);

  for (const Segment& segment : protocol.segments()) {
    if (const auto* gate = std::get_if<GateSegment>(&segment)) {
      const Matrix4 u = gate_unitary(gate->gate);
      rho = u * rho * u.adjoint();
      out.recorder.record(offset, rho);
    } else if (const auto* hold = std::get_if<HoldSegment>(&segment)) {
      const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(hold->duration_ns / kHoldGridNs)));
      const double dt = hold->duration_ns / static_cast<double>(n);
      const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(record_every_ns / dt)));
      const auto constant = [&](double) { return hold->drive; };
      out.smallest_step = std::min(out.smallest_step, dt / substeps);
      for (std::size_t k = 0; k < n; ++k) {
        const double t0 = dt * static_cast<double>(k);
        const double t1 = dt * static_cast<double>(k + 1);
        integrate_span(liouvillian, constant, t0, t1, substeps, rho, gamma_tot, out.photons);
        if ((k + 1) % stride == 0 || k + 1 == n) out.recorder.record(offset + t1, rho);
      }
      offset += hold->duration_ns;
    } else {
      const PulseSchedule& schedule = std::get<LoopSegment>(segment).schedule;
      const std::size_t n = schedule.steps();
      const std::size_t mid = n / 2;
      const double dt = schedule.dt();
      const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(record_every_ns / dt)));
      out.smallest_step = std::min(out.smallest_step, dt / substeps);
      for (std::size_t k = 0; k < n; ++k) {
        const bool inbound = k >= mid;
        const auto drive = [&](double t) { return drive_of(schedule, params, t, inbound); };
        const double t0 = dt * static_cast<double>(k);
        const double t1 = k + 1 == n ? schedule.duration() : dt * static_cast<double>(k + 1);
        integrate_span(liouvillian, drive, t0, t1, substeps, rho, gamma_tot, out.photons);
        if ((k + 1) % stride == 0 || k + 1 == n) out.recorder.record(offset + t1, rho);
      }
      offset += schedule.duration();
    }
  }
  out.final_state = rho;
  return out;
}

double max_difference(const Recorder& a, const Recorder& b) {
  double delta = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    delta = std::max(delta, (a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
  }
  return delta;
}

}  // namespace

Trajectory propagate(const DensityMatrix& rho0, const ProtocolSchedule& protocol, const LambdaParams& params,
                     const PropagationOptions& options) {
  if (!(options.tol >= 1e-12 && options.tol <= 1e-6)) {
    throw std::invalid_argument("propagation tolerance outside [1e-12, 1e-6]");
  }
  if (!(options.record_every_ns > 0.0)) throw std::invalid_argument("record stride must be positive");
  if (options.substeps < 0) throw std::invalid_argument("substeps must be non-negative");
  params.validate();
  if (!validate(rho0).ok()) throw std::invalid_argument("initial state is not a valid density matrix");

  const Liouvillian liouvillian(params);
  RunResult accepted;
  PropagationDiagnostics diag;

  if (options.substeps > 0) {
    accepted = run(rho0.matrix(), protocol, params, liouvillian, options.substeps, options.record_every_ns);
    diag.substeps = options.substeps;
  } else {
    int substeps = std::max(1, static_cast<int>(std::ceil(grid_step(protocol) * max_rate(params) /
                                                           kInitialStepScale)));
    RunResult coarse = run(rho0.matrix(), protocol, params, liouvillian, substeps, options.record_every_ns);
    bool converged = false;
    for (int attempt = 0; attempt < options.max_refinements; ++attempt) {
      substeps *= 2;
      RunResult fine = run(rho0.matrix(), protocol, params, liouvillian, substeps, options.record_every_ns);
      const double delta = max_difference(coarse.recorder, fine.recorder);
      coarse = std::move(fine);
      diag.convergence_delta = delta;
      if (delta < options.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalError(fmt::format("step halving did not reach tolerance {:g} (last change {:g})",
                                       options.tol, diag.convergence_delta));
    }
    accepted = std::move(coarse);
    diag.substeps = substeps;
  }
  diag.smallest_step_ns = accepted.smallest_step;

  Trajectory traj;
  const double gamma_tot = params.excited_decay_rate();
  const std::size_t m = accepted.recorder.times.size();
  traj.times = accepted.recorder.times;
  traj.bloch_spin.reserve(m);
  traj.pl_rate.reserve(m);
  for (auto& series : traj.populations) series.reserve(m);
  if (options.keep_states) traj.states.reserve(m);

  for (std::size_t i = 0; i < m; ++i) {
    const DensityMatrix rho(accepted.recorder.states[i]);
    const Diagnostics d = validate(rho);
    diag.max_trace_error = std::max(diag.max_trace_error, d.trace_error);
    diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, d.hermiticity_error);
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, d.min_eigenvalue);
    if (!d.ok()) {
      throw NumericalError(fmt::format(
          "state invariant violated at t = {:g} ns (trace error {:g}, hermiticity {:g}, min eigenvalue {:g})",
          traj.times[i], d.trace_error, d.hermiticity_error, d.min_eigenvalue));
    }
    for (int level = 0; level < 4; ++level) traj.populations[level].push_back(rho.matrix()(level, level).real());
    traj.bloch_spin.push_back(bloch_of(rho, kSpinPair));
    traj.pl_rate.push_back(std::max(0.0, gamma_tot * rho.population(Level::Excited)));
    if (options.keep_states) traj.states.push_back(rho);
  }
  traj.final_state = DensityMatrix(accepted.final_state);
  traj.emitted_photons = accepted.photons;
  traj.diagnostics = diag;
  return traj;
}

std::vector<double> pl_series(const Trajectory& trajectory, const LambdaParams& params) {
  const double gamma_tot = params.excited_decay_rate();
  std::vector<double> out;
  out.reserve(trajectory.times.size());
  for (double p : trajectory.populations[index(Level::Excited)]) out.push_back(std::max(0.0, gamma_tot * p));
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  fmt::print(out, "# {}\n", kBasisOrderNote);
  fmt::print(out, "# units: t in ns, populations and Bloch components dimensionless, pl_rate in photons/ns\n");
  fmt::print(out, "# bloch vector on the (-1_g, +1_g) pair\n");
  fmt::print(out, "t_ns,p_zero,p_minus,p_plus,p_excited,bloch_x,bloch_y,bloch_z,bloch_norm,pl_rate_per_ns\n");
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const BlochVector& b = trajectory.bloch_spin[i];
    fmt::print(out, "{:.6f},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n",
               trajectory.times[i], trajectory.populations[0][i], trajectory.populations[1][i],
               trajectory.populations[2][i], trajectory.populations[3][i], b.x, b.y, b.z, b.magnitude(),
               trajectory.pl_rate[i]);
  }
}

}  // namespace stirap
