#pragma once

#include <cmath>
#include <vector>

#include "kerrline/constants.hpp"
#include "kerrline/errors.hpp"
#include "kerrline/modes.hpp"

namespace kerrline {

/// Quartic-order couplings of the junction-coupled modes. Indices into the
/// matrices/tensors refer to `mode_indices` (1-based indices of the original
/// basis); junction-blind modes are excluded.
struct NonlinearCouplings {
  std::vector<int> mode_indices;
  std::vector<double> omega;          // bare linearized frequency (rad/s)
  std::vector<double> omega_shifted;  // omega'_m = omega_m - sum_n K_mn
  std::vector<std::vector<double>> kerr;  // K_mn (rad/s), symmetric
  double self_kerr(int i) const { return kerr[i][i]; }

  /// Beam-splitter amplitude zeta_lmn = (1 - delta_lm/2)(K_ll^2 K_mm K_nn)^(1/4).
  double beam_splitter(int l, int m, int n) const {
    const double factor = (l == m) ? 0.5 : 1.0;
    return factor * std::sqrt(std::sqrt(kerr[l][l] * kerr[l][l] *
                                        kerr[m][m] * kerr[n][n]));
  }
};

/// Flux-pump (parametric drive) amplitudes for one rf modulation setting.
struct PumpAmplitudes {
  std::vector<int> mode_indices;
  std::vector<double> one_photon;               // g_m (rad/s)
  std::vector<std::vector<double>> two_photon;  // g_mn (rad/s), symmetric
  double flux_dc = 0.0;   // Phi_x / Phi_0
  double flux_rf = 0.0;   // Phi_rf / Phi_0
  double omega_drive = 0.0;
};

/// Kerr, cross-Kerr and beam-splitter amplitudes from the mode properties.
/// K_mm = E'_C,m eta_l,m expressed in rad/s; K_mn = 2 sqrt(K_mm K_nn).
inline NonlinearCouplings nonlinear_couplings(
    const std::vector<ModeProperties>& props) {
  NonlinearCouplings nc;
  for (const auto& p : props) {
    if (!p.junction_coupled) continue;
    nc.mode_indices.push_back(p.index);
    nc.omega.push_back(p.omega);
    nc.kerr.emplace_back();
  }
  const std::size_t n = nc.mode_indices.size();
  if (n == 0)
    throw NumericalError("no junction-coupled modes; nothing to couple");
  std::vector<double> self(n);
  std::size_t i = 0;
  for (const auto& p : props) {
    if (!p.junction_coupled) continue;
    self[i++] = constants::two_pi * (*p.charging_energy_hz) * (*p.eta_l);
  }
  for (std::size_t a = 0; a < n; ++a) {
    nc.kerr[a].resize(n);
    for (std::size_t b = 0; b < n; ++b)
      nc.kerr[a][b] = (a == b) ? self[a] : 2.0 * std::sqrt(self[a] * self[b]);
  }
  nc.omega_shifted.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double shift = 0.0;
    for (std::size_t b = 0; b < n; ++b) shift += nc.kerr[a][b];
    nc.omega_shifted[a] = nc.omega[a] - shift;
  }
  return nc;
}

/// One- and two-photon flux-pump amplitudes for a SQUID modulated with
/// Phi_rf(t) = Phi_rf cos(omega_d t) around the dc bias Phi_x.
/// Fluxes are given in units of Phi_0.
inline PumpAmplitudes pump_amplitudes(const ModeBasis& basis,
                                      const std::vector<ModeProperties>& props,
                                      double flux_rf, double omega_drive) {
  const auto& junction = basis.circuit.junction;
  if (junction.kind != JunctionKind::squid)
    throw ValidationError("NotASquid: flux pumping requires a SQUID junction");
  PumpAmplitudes pa;
  pa.flux_dc = basis.flux;
  pa.flux_rf = flux_rf;
  pa.omega_drive = omega_drive;

  const double phase_rf = constants::two_pi * flux_rf;  // varphi_rf
  const double half_phase_dc = std::numbers::pi * basis.flux;  // varphi_x/2
  const double ej_sigma_j = constants::planck * junction.ejsigma_hz;
  const double kappa_phi = constants::two_pi / constants::flux_quantum;

  std::vector<double> cm, wm;
  for (const auto& p : props) {
    if (!p.junction_coupled) continue;
    pa.mode_indices.push_back(p.index);
    cm.push_back(*p.rescaled_capacitance);
    wm.push_back(p.omega);
  }
  const std::size_t n = pa.mode_indices.size();
  pa.one_photon.resize(n);
  pa.two_photon.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    pa.one_photon[a] = kappa_phi * junction.asymmetry * ej_sigma_j *
                       std::cos(half_phase_dc) /
                       std::sqrt(8.0 * constants::hbar * cm[a] * wm[a]) *
                       phase_rf;
    for (std::size_t b = 0; b < n; ++b) {
      pa.two_photon[a][b] = kappa_phi * kappa_phi * ej_sigma_j *
                            std::sin(half_phase_dc) /
                            (4.0 * std::sqrt(cm[a] * cm[b] * wm[a] * wm[b])) *
                            phase_rf;
    }
  }
  return pa;
}

/// Independent route to g_mn: the rate of change of the mode frequencies with
/// flux, by central finite difference re-solving the mode basis. Valid for
/// d << 1 and away from Phi_0/2.
inline double pump_amplitude_from_derivatives(const CircuitSpec& spec, int m,
                                              int n, double flux_dc,
                                              double flux_rf,
                                              double flux_step = 1e-4,
                                              int mode_count = 0) {
  if (spec.junction.kind != JunctionKind::squid)
    throw ValidationError("NotASquid: flux pumping requires a SQUID junction");
  if (spec.junction.asymmetry >= 0.1)
    throw ValidationError("derivative form requires asymmetry d < 0.1");
  const double dist = std::abs(std::remainder(flux_dc, 1.0));
  if (std::abs(dist - 0.5) <= flux_step)
    throw NumericalError("NearHalfQuantum: the derivative identity is not "
                         "valid at Phi_x = Phi_0/2");
  if (mode_count == 0) mode_count = std::max(m, n);
  const auto lo = find_modes(spec, flux_dc - flux_step, mode_count);
  const auto hi = find_modes(spec, flux_dc + flux_step, mode_count);
  const double dphi = 2.0 * flux_step * constants::flux_quantum;
  const double dm = (hi.modes[m - 1].omega - lo.modes[m - 1].omega) / dphi;
  const double dn = (hi.modes[n - 1].omega - lo.modes[n - 1].omega) / dphi;
  return std::sqrt(std::abs(dm * dn)) * flux_rf * constants::flux_quantum;
}

/// Perturbative capacitive-port photon loss rates,
///   kappa_m = sum_ports omega_m^2 C_a^2 Z_ext u_m(x_a)^2 / C_Sigma.
/// This is a modeling choice, not a first-principles formula; it reproduces
/// the quadratic C_a scaling and the right order of magnitude.
inline std::vector<double> decay_rates(const ModeBasis& basis) {
  const auto& spec = basis.circuit;
  if (!(spec.ports.z_ext_ohm > 0.0))
    throw ValidationError("ports.z_ext_ohm must be > 0");
  std::vector<double> kappa;
  kappa.reserve(basis.modes.size());
  const double ell = spec.half_length_m;
  for (const auto& m : basis.modes) {
    const double u_in = basis.mode_value(m, -ell);
    const double u_out = basis.mode_value(m, ell);
    const double w2 = m.omega * m.omega;
    const double ci = spec.ports.c_in_f;
    const double co = spec.ports.c_out_f;
    kappa.push_back(w2 * spec.ports.z_ext_ohm *
                    (ci * ci * u_in * u_in + co * co * u_out * u_out) /
                    basis.total_capacitance);
  }
  return kappa;
}

/// Lower bound on the photon number at which the junction's critical current
/// is reached, n_c = E_J/(hbar omega_m). The two equivalent algebraic forms
/// (through eta_l, E'_C and through eta_l, K_mm) are evaluated as an internal
/// consistency check.
inline double critical_photon_number(const ModeProperties& props,
                                     double ej_hz) {
  if (!props.junction_coupled)
    throw ValidationError("critical photon number requires a junction-coupled "
                          "mode");
  const double direct = constants::two_pi * ej_hz / props.omega;
  const double via_charging =
      std::sqrt(*props.eta_l) * std::sqrt(ej_hz / (8.0 * *props.charging_energy_hz));
  const double kerr = constants::two_pi * (*props.charging_energy_hz) * (*props.eta_l);
  const double via_kerr =
      *props.eta_l *
      std::sqrt(constants::planck * ej_hz / (8.0 * constants::hbar * kerr));
  if (std::abs(via_charging / direct - 1.0) > 1e-9 ||
      std::abs(via_kerr / direct - 1.0) > 1e-9)
    throw NumericalError("IdentityViolation: the critical-photon-number forms "
                         "disagree; upstream mode properties are inconsistent");
  return direct;
}

}  // namespace kerrline
