#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kerrline/constants.hpp"
#include "kerrline/errors.hpp"
#include "kerrline/modes.hpp"
#include "kerrline/nonlinear.hpp"

namespace kerrline {

/// One-mode reduction of the circuit around the dressed plasma mode:
/// H = 4 E_C n^2 + (E_L/2) phi^2 - E_J cos(phi). Energies as E/h in Hz.
struct InlineTransmonModel {
  double ec_hz = 0.0;
  double el_hz = 0.0;
  double ej_hz = 0.0;
};

/// Reduce a solved basis to the in-line transmon model of its first mode.
inline InlineTransmonModel inline_transmon_from_basis(const ModeBasis& basis) {
  const auto& m = basis.modes.at(0);
  const double du = m.delta_u;
  if (du == 0.0)
    throw NumericalError("first mode is junction-blind; no transmon reduction");
  const auto props = mode_properties(basis);
  InlineTransmonModel model;
  const double e = constants::elementary_charge;
  model.ec_hz = e * e * du * du / (2.0 * basis.total_capacitance) /
                constants::planck;
  model.el_hz = constants::reduced_flux_quantum *
                constants::reduced_flux_quantum /
                (props[0].resonator_inductance * du * du) / constants::planck;
  model.ej_hz = basis.ej_hz;
  return model;
}

struct TransmonSpectrum {
  std::vector<double> levels_hz;  // sorted eigenvalues, ground state first
  double omega01 = 0.0;           // rad/s
  double anharmonicity = 0.0;     // omega_21 - omega_10 (rad/s, signed)
  // Weak-anharmonicity closed-form estimates, for comparison only:
  double omega01_estimate = 0.0;      // 2 pi sqrt(8 E_C (E_L + E_J))
  double anharmonicity_estimate = 0.0;  // -2 pi E_C E_J/(E_J + E_L)
};

namespace detail {

/// Sinc-DVR kinetic matrix for -d^2/dphi^2 on a uniform grid of spacing h.
inline Eigen::MatrixXd dvr_second_derivative(int n, double h) {
  Eigen::MatrixXd t(n, n);
  const double pi2_3 = std::numbers::pi * std::numbers::pi / 3.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        t(i, j) = pi2_3;
      } else {
        const double d = i - j;
        t(i, j) = ((i - j) % 2 == 0 ? 2.0 : -2.0) / (d * d);
      }
    }
  }
  return t / (h * h);
}

inline TransmonSpectrum charge_basis_spectrum(const InlineTransmonModel& model,
                                              int charge_cut) {
  const int dim = 2 * charge_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i - charge_cut;
    h(i, i) = 4.0 * model.ec_hz * n * n;
    if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = -0.5 * model.ej_hz;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  TransmonSpectrum out;
  const auto& ev = solver.eigenvalues();
  out.levels_hz.assign(ev.data(), ev.data() + ev.size());
  return out;
}

}  // namespace detail

/// Diagonalize the one-mode Hamiltonian on a phase grid (sinc DVR), with the
/// box size grown until the low-lying states vanish at the boundary. For
/// E_L = 0 the potential is 2 pi periodic and the charge basis is used
/// instead. `basis_size` must be odd and >= 31.
inline TransmonSpectrum inline_transmon_spectrum(const InlineTransmonModel& model,
                                                 int basis_size = 201) {
  if (basis_size < 31 || basis_size % 2 == 0)
    throw ValidationError("basis_size must be odd and >= 31");
  TransmonSpectrum out;
  if (model.el_hz == 0.0) {
    out = detail::charge_basis_spectrum(model, (basis_size - 1) / 2);
  } else {
    const double e_conf = model.el_hz + model.ej_hz;
    const double spread = std::pow(2.0 * model.ec_hz / e_conf, 0.25);
    double phi_max = std::max(std::numbers::pi + 2.0, 10.0 * spread);
    bool converged = false;
    for (int attempt = 0; attempt < 8 && !converged; ++attempt) {
      const int n = basis_size;
      const double h_grid = 2.0 * phi_max / (n - 1);
      Eigen::MatrixXd ham =
          4.0 * model.ec_hz * detail::dvr_second_derivative(n, h_grid);
      for (int i = 0; i < n; ++i) {
        const double phi = -phi_max + i * h_grid;
        ham(i, i) += 0.5 * model.el_hz * phi * phi -
                     model.ej_hz * std::cos(phi);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham);
      const auto& vecs = solver.eigenvectors();
      const double edge = std::max({std::abs(vecs(0, 0)), std::abs(vecs(n - 1, 0)),
                                    std::abs(vecs(0, 2)), std::abs(vecs(n - 1, 2))});
      const double peak = vecs.col(0).cwiseAbs().maxCoeff();
      if (edge < 1e-10 * peak) {
        const auto& ev = solver.eigenvalues();
        out.levels_hz.assign(ev.data(), ev.data() + ev.size());
        converged = true;
      } else {
        phi_max *= 1.5;
      }
    }
    if (!converged)
      throw NumericalError("NotConverged: wavefunction does not vanish at the "
                           "phase-grid boundary; raise basis_size");
  }
  const double f01 = out.levels_hz[1] - out.levels_hz[0];
  const double f12 = out.levels_hz[2] - out.levels_hz[1];
  out.omega01 = constants::two_pi * f01;
  out.anharmonicity = constants::two_pi * (f12 - f01);
  out.omega01_estimate = constants::two_pi *
                         std::sqrt(8.0 * model.ec_hz * (model.el_hz + model.ej_hz));
  out.anharmonicity_estimate =
      -constants::two_pi * model.ec_hz * model.ej_hz /
      (model.ej_hz + model.el_hz);
  return out;
}

enum class CouplingModel { current_biased, end_coupled, exact_numeric };

struct CouplingReport {
  double omega_r = 0.0;       // resonator frequency (rad/s)
  double omega_p = 0.0;       // plasma/qubit frequency (rad/s)
  double g = 0.0;             // coupling (rad/s)
  double ratio = 0.0;         // g/omega_p
  double anharmonicity = 0.0; // rad/s, signed
  CouplingModel model = CouplingModel::exact_numeric;
  bool validity_warning = false;
  std::string note;
};

/// Coupling ratio of the current-biased lumped model: a junction of energy
/// E_J and capacitance C_J sharing the inductor of an LC oscillator.
inline CouplingReport current_biased_coupling(double l_h, double c_f,
                                              double cj_f, double ej_hz) {
  if (!(l_h > 0.0 && c_f > 0.0 && cj_f > 0.0 && ej_hz > 0.0))
    throw ValidationError("current_biased_coupling requires positive L, C, "
                          "C_J, E_J");
  CouplingReport rep;
  rep.model = CouplingModel::current_biased;
  const double e = constants::elementary_charge;
  const double ec = e * e / (2.0 * cj_f) / constants::planck;
  const double el = constants::reduced_flux_quantum *
                    constants::reduced_flux_quantum / (4.0 * l_h) /
                    constants::planck;
  rep.omega_p = constants::two_pi * std::sqrt(8.0 * ec * (ej_hz + el));
  rep.omega_r = 1.0 / std::sqrt(l_h * c_f);
  const double z_r = std::sqrt(l_h / c_f);
  rep.ratio = rep.omega_r / (2.0 * rep.omega_p) *
              std::sqrt(constants::vacuum_impedance /
                        (8.0 * std::numbers::pi * constants::fine_structure * z_r)) *
              std::pow(ec / (8.0 * (ej_hz + el)), 0.25);
  rep.g = rep.ratio * rep.omega_p;
  rep.anharmonicity = -constants::two_pi * ec * ej_hz / (ej_hz + el);
  if (ej_hz + el < 10.0 * ec) {
    rep.validity_warning = true;
    rep.note = "E_J + E_L is not large against E_C; the weakly anharmonic "
               "oscillator picture is invalid";
  }
  return rep;
}

/// Pure algebraic form of the end-coupled ratio,
/// g/omega_p = sqrt(2 pi Z'_r alpha / Z_vac) (E_J / 2 E_C)^(1/4).
inline double end_coupled_ratio(double z_r_prime_ohm, double ej_hz,
                                double ec_hz) {
  return std::sqrt(constants::two_pi * z_r_prime_ohm *
                   constants::fine_structure / constants::vacuum_impedance) *
         std::pow(ej_hz / (2.0 * ec_hz), 0.25);
}

/// Effective model for a junction a short distance l_q from the right end of
/// the resonator: a transmon island coupled to the lambda/2 mode.
inline CouplingReport end_coupled_model(const CircuitSpec& spec,
                                        double flux = 0.0) {
  CouplingReport rep;
  rep.model = CouplingModel::end_coupled;
  const double ell = spec.half_length_m;
  const double lq = ell - spec.junction_position_m;
  if (lq / (2.0 * ell) > 0.1) {
    rep.validity_warning = true;
    rep.note = "l_q/2l exceeds 0.1; the end-coupled reduction degrades";
  }
  const double c0 = spec.left.c_per_m;
  const double cj = spec.junction.cj_f;
  const double c_res = (2.0 * ell * c0 + cj) / 2.0;
  const double c_q = cj + lq * c0;
  const double e = constants::elementary_charge;
  const double ec = e * e / (2.0 * c_q) / constants::planck;
  const double ej = effective_josephson_energy(spec.junction, flux);
  rep.omega_p = constants::two_pi * std::sqrt(8.0 * ec * ej);
  rep.omega_r = find_modes_bare(spec, 1).modes[0].omega;
  const double z_r_prime = 1.0 / (c_res * rep.omega_r);
  rep.ratio = end_coupled_ratio(z_r_prime, ej, ec);
  rep.g = rep.ratio * rep.omega_p;
  rep.anharmonicity = -constants::two_pi * ec;
  rep.note += (rep.note.empty() ? "" : "; ");
  rep.note += "neglected charge-coupling weight C_J/C_q = " +
              std::to_string(cj / c_q);
  return rep;
}

struct AvoidedCrossingPoint {
  double flux = 0.0;
  double omega1 = 0.0, omega2 = 0.0;  // rad/s
  double kerr1 = 0.0, kerr2 = 0.0;    // rad/s (0 if blind)
  double eta1 = 0.0, eta2 = 0.0;
};

struct AvoidedCrossingResult {
  CouplingReport report;
  double flux_at_minimum = 0.0;
  std::vector<AvoidedCrossingPoint> sweep;
};

namespace detail {

inline AvoidedCrossingPoint crossing_point(const CircuitSpec& spec,
                                           double flux) {
  AvoidedCrossingPoint pt;
  pt.flux = flux;
  const auto basis = find_modes(spec, flux, 2);
  const auto props = mode_properties(basis);
  pt.omega1 = props[0].omega;
  pt.omega2 = props[1].omega;
  auto kerr_of = [](const ModeProperties& p) {
    return p.junction_coupled
               ? constants::two_pi * (*p.charging_energy_hz) * (*p.eta_l)
               : 0.0;
  };
  pt.kerr1 = kerr_of(props[0]);
  pt.kerr2 = kerr_of(props[1]);
  pt.eta1 = props[0].eta_l.value_or(0.0);
  pt.eta2 = props[1].eta_l.value_or(0.0);
  return pt;
}

}  // namespace detail

/// Sweep the exact two lowest modes across a flux range, locate the minimum
/// splitting and extract g = min-splitting/2. The linearized mode
/// frequencies are used (Kerr shifts excluded from the splitting).
inline AvoidedCrossingResult avoided_crossing(const CircuitSpec& spec,
                                              double flux_lo, double flux_hi,
                                              int n_points) {
  if (n_points < 5) throw ValidationError("avoided_crossing needs >= 5 points");
  AvoidedCrossingResult result;
  result.sweep.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double flux = flux_lo + (flux_hi - flux_lo) * i / (n_points - 1);
    result.sweep.push_back(detail::crossing_point(spec, flux));
  }
  auto split = [](const AvoidedCrossingPoint& p) { return p.omega2 - p.omega1; };
  int best = 0;
  for (int i = 1; i < n_points; ++i)
    if (split(result.sweep[i]) < split(result.sweep[best])) best = i;
  if (best == 0 || best == n_points - 1)
    throw NumericalError("NoCrossingFound: the mode splitting is monotone "
                         "across the flux range");
  // Golden-section refinement between the neighbors of the grid minimum.
  double a = result.sweep[best - 1].flux;
  double b = result.sweep[best + 1].flux;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  auto eval = [&](double f) { return split(detail::crossing_point(spec, f)); };
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2);
    }
  }
  const double flux_min = 0.5 * (a + b);
  const auto at_min = detail::crossing_point(spec, flux_min);
  result.flux_at_minimum = flux_min;
  result.report.model = CouplingModel::exact_numeric;
  result.report.g = 0.5 * (at_min.omega2 - at_min.omega1);
  result.report.omega_p = 0.5 * (at_min.omega1 + at_min.omega2);
  result.report.omega_r = result.report.omega_p;
  result.report.ratio = result.report.g / result.report.omega_p;
  result.report.anharmonicity = -std::max(at_min.kerr1, at_min.kerr2);
  return result;
}

}  // namespace kerrline
