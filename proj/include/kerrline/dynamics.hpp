#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "kerrline/constants.hpp"
#include "kerrline/errors.hpp"

namespace kerrline {

using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Truncated single-mode Fock space with the ladder operators cached.
/// [a, a+] = 1 holds on the first N-1 levels; the top level is the usual
/// truncation artifact.
struct FockSpace {
  int dim = 0;
  Operator a, ad, n, n2;

  explicit FockSpace(int n_levels) : dim(n_levels) {
    if (n_levels < 2) throw ValidationError("Fock dimension must be >= 2");
    a = Operator::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
    ad = a.adjoint();
    n = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = double(k);
    n2 = n * n;
  }
};

/// Throw unless rho is a physical density matrix: unit trace to 1e-9,
/// Hermitian to 1e-12, eigenvalues > -1e-9.
inline void check_density_matrix(const Operator& rho) {
  if (rho.rows() != rho.cols())
    throw ValidationError("density matrix must be square");
  if (std::abs(rho.trace().real() - 1.0) > 1e-9 ||
      std::abs(rho.trace().imag()) > 1e-9)
    throw ValidationError("density matrix trace must be 1 within 1e-9");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("density matrix must be Hermitian within 1e-12");
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("density matrix must be positive semidefinite");
}

/// Normalized truncated coherent state |alpha> as a ket.
inline StateVector coherent_vector(std::complex<double> alpha,
                                   const FockSpace& space) {
  const double a2 = std::norm(alpha);
  const double aa = std::abs(alpha);
  if (a2 + 6.0 * aa + 9.0 > space.dim)
    throw ValidationError(
        "TruncationTooSmall: need |alpha|^2 + 6|alpha| + 9 <= N");
  StateVector psi(space.dim);
  psi(0) = 1.0;
  for (int k = 1; k < space.dim; ++k)
    psi(k) = psi(k - 1) * alpha / std::sqrt(double(k));
  psi /= psi.norm();
  return psi;
}

inline Operator coherent_state(std::complex<double> alpha,
                               const FockSpace& space) {
  const StateVector psi = coherent_vector(alpha, space);
  return psi * psi.adjoint();
}

/// Drive term amplitude/frequency, both rad/s.
struct DriveSpec {
  double epsilon = 0.0;
  double omega_d = 0.0;
};

/// Single Kerr mode in the frame rotating at omega_d:
///   H/hbar = (omega_eff - omega_d) n - (K/2) n^2 + epsilon (a+ + a).
inline Operator single_mode_hamiltonian(double omega_eff, double kerr,
                                        const DriveSpec& drive,
                                        const FockSpace& space) {
  if (drive.epsilon < 0.0) throw ValidationError("drive.epsilon must be >= 0");
  Operator h = (omega_eff - drive.omega_d) * space.n - 0.5 * kerr * space.n2;
  if (drive.epsilon != 0.0) h += drive.epsilon * (space.ad + space.a);
  return h;
}

/// Same Hamiltonian in the lab frame; the drive carries its explicit time
/// dependence 2 epsilon cos(omega_d t).
inline std::function<Operator(double)> single_mode_hamiltonian_lab(
    double omega_eff, double kerr, const DriveSpec& drive,
    const FockSpace& space) {
  const Operator h0 = omega_eff * space.n - 0.5 * kerr * space.n2;
  const Operator x = space.ad + space.a;
  return [h0, x, drive](double t) {
    return Operator(h0 +
                    2.0 * drive.epsilon * std::cos(drive.omega_d * t) * x);
  };
}

/// Collapse channel L with a (possibly time-dependent) rate, entering the
/// dissipator as rate(t) (L rho L+ - {L+L, rho}/2).
struct CollapseOp {
  Operator op;
  std::function<double(double)> rate;

  CollapseOp(Operator o, double constant_rate)
      : op(std::move(o)), rate([constant_rate](double) { return constant_rate; }) {}
  CollapseOp(Operator o, std::function<double(double)> r)
      : op(std::move(o)), rate(std::move(r)) {}
};

struct Trajectory {
  std::vector<double> t;       // s
  std::vector<double> n_mean;  // <n>
  std::vector<double> p1;      // <1|rho|1>
  std::vector<double> purity;  // tr rho^2
  Operator rho_final;
  double max_trace_drift = 0.0;  // |tr rho - 1| before renormalization
  double dt_used = 0.0;
};

namespace detail {

inline Operator lindblad_rhs(const Operator& rho, const Operator& h,
                             const std::vector<CollapseOp>& collapse,
                             const std::vector<Operator>& ldl,
                             const std::vector<double>& rates) {
  Operator out = std::complex<double>(0.0, -1.0) * (h * rho - rho * h);
  for (std::size_t j = 0; j < collapse.size(); ++j) {
    if (rates[j] == 0.0) continue;
    out += rates[j] * (collapse[j].op * rho * collapse[j].op.adjoint() -
                       0.5 * (ldl[j] * rho + rho * ldl[j]));
  }
  return out;
}

}  // namespace detail

/// Fixed-step RK4 integration of the Lindblad master equation. The state is
/// hermitized and trace-renormalized after every step; the accumulated drift
/// is reported and bounded. `n_samples` observable points are recorded on a
/// uniform grid including both endpoints.
inline Trajectory evolve_lindblad(const Operator& rho0,
                                  const std::function<Operator(double)>& h_of_t,
                                  const std::vector<CollapseOp>& collapse,
                                  double t_end, double dt, int n_samples = 201) {
  if (!(t_end > 0.0) || !(dt > 0.0))
    throw ValidationError("t_end and dt must be > 0");
  if (n_samples < 2) throw ValidationError("n_samples must be >= 2");
  const int dim = static_cast<int>(rho0.rows());

  // Stability heuristic: the step must resolve the fastest rate present.
  const Operator h0 = h_of_t(0.0);
  double max_rate = h0.cwiseAbs().rowwise().sum().maxCoeff();  // >= spectral radius
  for (const auto& c : collapse) {
    const double row = c.op.cwiseAbs().rowwise().sum().maxCoeff();
    max_rate += c.rate(0.0) * row * row;
  }
  if (max_rate > 0.0 && dt > 0.05 / max_rate)
    throw NumericalError("StepTooLarge: dt must be <= 0.05/max-rate = " +
                         std::to_string(0.05 / max_rate) + " s");

  std::vector<Operator> ldl;
  ldl.reserve(collapse.size());
  for (const auto& c : collapse) ldl.push_back(c.op.adjoint() * c.op);

  const long long n_steps = static_cast<long long>(std::ceil(t_end / dt));
  const double h_step = t_end / n_steps;

  Trajectory traj;
  traj.dt_used = h_step;
  traj.t.reserve(n_samples);

  Operator rho = rho0;
  std::vector<double> rates(collapse.size());
  auto record = [&](double t) {
    traj.t.push_back(t);
    traj.n_mean.push_back([&] {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += k * rho(k, k).real();
      return s;
    }());
    traj.p1.push_back(dim > 1 ? rho(1, 1).real() : 0.0);
    traj.purity.push_back((rho * rho).trace().real());
  };

  long long next_sample = 0;
  for (long long step = 0; step <= n_steps; ++step) {
    const double t = step * h_step;
    // Uniform sampling grid over [0, t_end], snapped to integration steps.
    if (step * (n_samples - 1) >= next_sample * n_steps) {
      record(t);
      ++next_sample;
    }
    if (step == n_steps) break;

    auto rhs = [&](const Operator& r, double tt) {
      const Operator h = h_of_t(tt);
      for (std::size_t j = 0; j < collapse.size(); ++j)
        rates[j] = collapse[j].rate(tt);
      return detail::lindblad_rhs(r, h, collapse, ldl, rates);
    };
    const Operator k1 = rhs(rho, t);
    const Operator k2 = rhs(rho + 0.5 * h_step * k1, t + 0.5 * h_step);
    const Operator k3 = rhs(rho + 0.5 * h_step * k2, t + 0.5 * h_step);
    const Operator k4 = rhs(rho + h_step * k3, t + h_step);
    rho += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(tr - 1.0));
    if (traj.max_trace_drift > 1e-6)
      throw NumericalError("TraceDrift: trace drift exceeded 1e-6; reduce dt");
    rho /= tr;
  }
  traj.rho_final = rho;
  return traj;
}

/// Default integration step obeying the stability heuristic with margin.
inline double default_time_step(const Operator& h,
                                const std::vector<CollapseOp>& collapse) {
  double max_rate = h.cwiseAbs().rowwise().sum().maxCoeff();
  for (const auto& c : collapse) {
    const double row = c.op.cwiseAbs().rowwise().sum().maxCoeff();
    max_rate += c.rate(0.0) * row * row;
  }
  return 0.04 / max_rate;
}

/// Drive a Kerr mode from vacuum at the blockade frequency
/// omega_d = omega_r - K/2 (levels 0 and 1 degenerate in the rotating frame).
inline Trajectory simulate_blockade(double omega_r, double kerr, double kappa,
                                    double epsilon, double t_end, int n_fock,
                                    double dt = 0.0, int n_samples = 401) {
  FockSpace space(n_fock);
  DriveSpec drive{epsilon, omega_r - 0.5 * kerr};
  const Operator h = single_mode_hamiltonian(omega_r, kerr, drive, space);
  std::vector<CollapseOp> collapse;
  collapse.emplace_back(space.a, kappa);
  if (dt <= 0.0) dt = default_time_step(h, collapse);
  Operator rho0 = Operator::Zero(n_fock, n_fock);
  rho0(0, 0) = 1.0;
  return evolve_lindblad(
      rho0, [&h](double) { return h; }, collapse, t_end, dt, n_samples);
}

/// Flux pulse Phi_x(t): raised-cosine ramp from phi_start to phi_peak over
/// t_ramp, plateau for t_plateau, symmetric ramp back. Continuous and once
/// differentiable; Phi_x(0) = Phi_x(t_end) = phi_start.
struct FluxPulse {
  double phi_start = 0.0;  // units of Phi_0
  double phi_peak = 0.0;
  double t_ramp = 0.0;     // s
  double t_plateau = 0.0;  // s

  double t_end() const { return 2.0 * t_ramp + t_plateau; }

  double value(double t) const {
    if (t <= 0.0 || t >= t_end()) return phi_start;
    double s;  // ramp progress in [0, 1]
    if (t < t_ramp) {
      s = 0.5 * (1.0 - std::cos(std::numbers::pi * t / t_ramp));
    } else if (t < t_ramp + t_plateau) {
      s = 1.0;
    } else {
      s = 0.5 * (1.0 - std::cos(std::numbers::pi * (t_end() - t) / t_ramp));
    }
    return phi_start + (phi_peak - phi_start) * s;
  }
};

/// Ideal Kerr cat against which fidelities are computed:
/// (e^{i pi/4} |alpha> + e^{-i pi/4} |-alpha>)/sqrt(2).
inline StateVector cat_vector(std::complex<double> alpha,
                              const FockSpace& space) {
  const std::complex<double> ph(std::cos(std::numbers::pi / 4.0),
                                std::sin(std::numbers::pi / 4.0));
  StateVector psi = ph * coherent_vector(alpha, space) +
                    std::conj(ph) * coherent_vector(-alpha, space);
  psi /= psi.norm();
  return psi;
}

struct CatResult {
  Operator rho_final;
  double fidelity = 0.0;
  double tau_used = 0.0;   // s, total pulse length
  double theta_opt = 0.0;  // rotation angle maximizing the fidelity
  Trajectory trajectory;
};

/// Kerr-evolve a coherent state through a flux pulse into a cat state.
/// The frame rotates at the instantaneous linear mode frequency, so only
/// H(t)/hbar = -(K(t)/2) n^2 and the damping act. The plateau length is
/// auto-scaled so that the accumulated Kerr phase is exactly pi; the ramp
/// contribution is integrated by Simpson's rule.
inline CatResult simulate_cat(const std::function<double(double)>& kerr_of_flux,
                              const std::function<double(double)>& kappa_of_flux,
                              FluxPulse pulse, std::complex<double> alpha,
                              int n_fock, double dt = 0.0) {
  const double k_peak = kerr_of_flux(pulse.phi_peak);
  if (!(k_peak > 0.0))
    throw ValidationError("Kerr coefficient at the pulse peak must be > 0");

  // Kerr phase picked up during both ramps (independent of t_plateau).
  double ramp_phase = 0.0;
  const int ns = 400;  // Simpson panels per ramp
  pulse.t_plateau = 0.0;
  for (int half = 0; half < 2; ++half) {
    const double t0 = half == 0 ? 0.0 : pulse.t_ramp;
    const double h = pulse.t_ramp / ns;
    double acc = 0.0;
    for (int i = 0; i <= ns; ++i) {
      const double w = (i == 0 || i == ns) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * kerr_of_flux(pulse.value(t0 + i * h));
    }
    ramp_phase += acc * h / 3.0;
  }
  const double remaining = std::numbers::pi - ramp_phase;
  if (remaining < 0.0)
    throw NumericalError("PhaseTargetUnreachable: the ramps alone accumulate "
                         "more than pi of Kerr phase; shorten t_ramp");
  pulse.t_plateau = remaining / k_peak;

  FockSpace space(n_fock);
  const Operator rho0 = coherent_state(alpha, space);
  auto h_of_t = [&](double t) {
    return Operator(-0.5 * kerr_of_flux(pulse.value(t)) * space.n2);
  };
  std::vector<CollapseOp> collapse;
  collapse.emplace_back(space.a, [&](double t) {
    return kappa_of_flux(pulse.value(t));
  });
  if (dt <= 0.0) dt = default_time_step(h_of_t(pulse.t_ramp), collapse);

  CatResult result;
  result.tau_used = pulse.t_end();
  result.trajectory =
      evolve_lindblad(rho0, h_of_t, collapse, pulse.t_end(), dt, 101);
  result.rho_final = result.trajectory.rho_final;

  // Fidelity against the ideal cat, maximized over one global rotation.
  auto fidelity_at = [&](double theta) {
    const StateVector target =
        cat_vector(alpha * std::exp(std::complex<double>(0.0, theta)), space);
    return (target.adjoint() * result.rho_final * target)(0, 0).real();
  };
  double best_theta = 0.0, best = -1.0;
  for (int i = 0; i < 720; ++i) {
    const double theta = constants::two_pi * i / 720.0;
    const double f = fidelity_at(theta);
    if (f > best) {
      best = f;
      best_theta = theta;
    }
  }
  double a = best_theta - constants::two_pi / 720.0;
  double b = best_theta + constants::two_pi / 720.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = fidelity_at(x1), f2 = fidelity_at(x2);
  for (int it = 0; it < 50; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = fidelity_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = fidelity_at(x2);
    }
  }
  result.theta_opt = 0.5 * (a + b);
  result.fidelity = fidelity_at(result.theta_opt);
  return result;
}

struct WignerGrid {
  std::vector<double> x, p;            // axes
  std::vector<std::vector<double>> w;  // w[ix][ip]
};

namespace detail {

/// Truncated displacement D(beta) = e^{-|beta|^2/2} e^{beta a+} e^{-beta* a},
/// built from the closed-form triangular exponentials.
inline Operator displacement(std::complex<double> beta, int dim) {
  Operator up = Operator::Zero(dim, dim);  // e^{beta a+}, lower triangular
  for (int n = 0; n < dim; ++n) {
    up(n, n) = 1.0;
    for (int m = n + 1; m < dim; ++m)
      up(m, n) = up(m - 1, n) * beta * std::sqrt(double(m)) / double(m - n);
  }
  Operator dn = Operator::Zero(dim, dim);  // e^{-beta* a}, upper triangular
  const std::complex<double> mb = -std::conj(beta);
  for (int m = 0; m < dim; ++m) {
    dn(m, m) = 1.0;
    for (int n = m + 1; n < dim; ++n)
      dn(m, n) = dn(m, n - 1) * mb * std::sqrt(double(n)) / double(n - m);
  }
  return std::exp(-0.5 * std::norm(beta)) * up * dn;
}

}  // namespace detail

/// Wigner function by displaced parity,
///   W(x, p) = (1/pi) tr[rho D(beta) P D+(beta)],  beta = (x + i p)/sqrt(2),
/// normalized so that the vacuum peaks at 1/pi and the grid integral is 1.
inline WignerGrid wigner(const Operator& rho, double extent, int resolution) {
  if (resolution < 2 || !(extent > 0.0))
    throw ValidationError("wigner needs extent > 0 and resolution >= 2");
  const int dim = static_cast<int>(rho.rows());
  WignerGrid grid;
  grid.x.resize(resolution);
  grid.p.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    grid.x[i] = -extent + 2.0 * extent * i / (resolution - 1);
    grid.p[i] = grid.x[i];
  }
  Eigen::VectorXd parity(dim);
  for (int k = 0; k < dim; ++k) parity(k) = (k % 2 == 0) ? 1.0 : -1.0;
  grid.w.assign(resolution, std::vector<double>(resolution, 0.0));
  for (int ix = 0; ix < resolution; ++ix) {
    for (int ip = 0; ip < resolution; ++ip) {
      const std::complex<double> beta(grid.x[ix] / std::sqrt(2.0),
                                      grid.p[ip] / std::sqrt(2.0));
      const Operator d = detail::displacement(beta, dim);
      const Operator m = rho * d;  // sum_k parity_k (D+ rho D)_kk
      double val = 0.0;
      for (int k = 0; k < dim; ++k)
        val += parity(k) * (d.col(k).adjoint() * m.col(k))(0, 0).real();
      grid.w[ix][ip] = val / std::numbers::pi;
    }
  }
  return grid;
}

/// Two-mode Kerr/cross-Kerr Hamiltonian with a parametric two-photon drive of
/// complex envelope g (the rotating drive factor evaluated by the caller):
///   H/hbar = sum_m omega_m n_m - (K_mm/2) n_m^2 - K_12 n_1 n_2
///            - Re(g) (a1+ + a1)(a2+ + a2).
/// Exposed for model construction only; dimensions are capped at 12 each.
inline Operator two_mode_hamiltonian(const FockSpace& mode1,
                                     const FockSpace& mode2, double omega1,
                                     double omega2, double k11, double k22,
                                     double k12, double g_drive) {
  if (mode1.dim > 12 || mode2.dim > 12)
    throw ValidationError("two-mode spaces are capped at 12 levels each");
  const Operator i1 = Operator::Identity(mode1.dim, mode1.dim);
  const Operator i2 = Operator::Identity(mode2.dim, mode2.dim);
  auto kron = [](const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  Operator h = omega1 * kron(mode1.n, i2) + omega2 * kron(i1, mode2.n) -
               0.5 * k11 * kron(mode1.n2, i2) - 0.5 * k22 * kron(i1, mode2.n2) -
               k12 * kron(mode1.n, mode2.n);
  if (g_drive != 0.0)
    h -= g_drive * kron(mode1.ad + mode1.a, mode2.ad + mode2.a);
  return h;
}

}  // namespace kerrline
