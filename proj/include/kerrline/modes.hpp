#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kerrline/circuit.hpp"
#include "kerrline/constants.hpp"
#include "kerrline/errors.hpp"

namespace kerrline {

/// Spatial profile of normal mode m. Piecewise sinusoid with a jump
/// (the kink delta_u) at the junction position:
///   u(x) = A sin[k (x + ell) - phi_i]              for x <= x_J
///   u(x) = A B sin[k_right (x - ell) + phi_o]      for x >= x_J
struct ModeEnvelope {
  int index = 0;          // 1-based
  double k = 0.0;         // left-segment wavevector (1/m)
  double k_right = 0.0;   // right-segment wavevector, k_right v_r = k v_l
  double omega = 0.0;     // rad/s
  double amplitude = 0.0;      // A
  double relative_amplitude = 0.0;  // B
  double phi_in = 0.0;    // port phase at x = -ell
  double phi_out = 0.0;   // port phase at x = +ell
  double delta_u = 0.0;   // kink u(x_J+) - u(x_J-)
};

/// Solved normal-mode family of one circuit at one flux bias.
struct ModeBasis {
  CircuitSpec circuit;
  double flux = 0.0;            // dc bias, units of Phi_0
  bool has_junction = true;     // false for the junction-free reference solve
  double ej_hz = 0.0;           // effective E_J/h at this flux (0 if bare)
  double inv_lj = 0.0;          // 1/L_J (0 if bare)
  double cj_f = 0.0;            // junction capacitance entering the basis
  double total_capacitance = 0.0;  // C_Sigma
  std::vector<ModeEnvelope> modes;

  double mode_value(const ModeEnvelope& m, double x) const {
    const double ell = circuit.half_length_m;
    if (x <= circuit.junction_position_m)
      return m.amplitude * std::sin(m.k * (x + ell) - m.phi_in);
    return m.amplitude * m.relative_amplitude *
           std::sin(m.k_right * (x - ell) + m.phi_out);
  }
};

/// Effective lumped parameters of a single mode.
struct ModeProperties {
  int index = 0;
  double omega = 0.0;            // rad/s
  double mode_inductance = 0.0;  // L_m = 1/(C_Sigma omega^2)
  double resonator_capacitance = 0.0;  // C~_m
  double resonator_inductance = 0.0;   // L~_m
  bool junction_coupled = false;
  // Defined only for junction-coupled modes (delta_u != 0):
  std::optional<double> rescaled_capacitance;  // C'_m = C_Sigma/delta_u^2
  std::optional<double> rescaled_inductance;   // L'_m = L_m delta_u^2
  std::optional<double> eta_c;                 // C_J/C'_m
  std::optional<double> eta_l;                 // L'_m/L_J
  std::optional<double> charging_energy_hz;    // E'_C,m = e^2/(2 C'_m)/h
};

namespace detail {

/// Integral of cos(alpha x + beta) over [x0, x1], stable as alpha -> 0.
inline double integral_cos(double alpha, double beta, double x0, double x1) {
  const double delta = x1 - x0;
  const double half = 0.5 * alpha * delta;
  const double mid = 0.5 * alpha * (x0 + x1) + beta;
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0
                                            : std::sin(half) / half;
  return delta * std::cos(mid) * sinc;
}

inline double integral_sin_sin(double a, double b, double c, double d,
                               double x0, double x1) {
  return 0.5 * (integral_cos(a - c, b - d, x0, x1) -
                integral_cos(a + c, b + d, x0, x1));
}

inline double integral_cos_cos(double a, double b, double c, double d,
                               double x0, double x1) {
  return 0.5 * (integral_cos(a - c, b - d, x0, x1) +
                integral_cos(a + c, b + d, x0, x1));
}

inline double port_phase(double omega, double c_port, double z0) {
  // tan(phi) = |Z_port(omega)/Z0| = 1/(omega C Z0); C -> 0 gives phi -> pi/2.
  return std::atan2(1.0, omega * c_port * z0);
}

struct ResidualTerms {
  double omega, k_right;
  double phi_in, phi_out;
  double sin_i, cos_i;  // at k (x_J + ell) - phi_i
  double sin_o, cos_o;  // at k_right (x_J - ell) + phi_o
  double junction_factor;  // -(k ell)^2 C_J/(C0_l ell) + L0_l ell/L_J
};

inline ResidualTerms residual_terms(double k, const CircuitSpec& spec,
                                    double inv_lj) {
  ResidualTerms t;
  const double ell = spec.half_length_m;
  const double xj = spec.junction_position_m;
  const double vl = spec.left.velocity();
  const double vr = spec.right.velocity();
  t.omega = k * vl;
  t.k_right = k * vl / vr;
  t.phi_in = port_phase(t.omega, spec.ports.c_in_f, spec.left.impedance());
  t.phi_out = port_phase(t.omega, spec.ports.c_out_f, spec.right.impedance());
  const double arg_i = k * (xj + ell) - t.phi_in;
  const double arg_o = t.k_right * (xj - ell) + t.phi_out;
  t.sin_i = std::sin(arg_i);
  t.cos_i = std::cos(arg_i);
  t.sin_o = std::sin(arg_o);
  t.cos_o = std::cos(arg_o);
  const double kl = k * ell;
  t.junction_factor = -kl * kl * spec.junction.cj_f / (spec.left.c_per_m * ell) +
                      spec.left.l_per_m * ell * inv_lj;
  return t;
}

}  // namespace detail

/// Pole-free residual of the wavevector eigenvalue condition. Both sides of
/// the tan-form equation are multiplied by cos_o cos_i so the residual is
/// continuous in k; its sign changes bracket the physical roots. Spurious
/// zeros where both cosines vanish simultaneously are filtered by the caller.
inline double eigenvalue_residual(double k, const CircuitSpec& spec,
                                  double ej_hz) {
  const double inv_lj = 1.0 / constants::josephson_inductance(ej_hz);
  const auto t = detail::residual_terms(k, spec, inv_lj);
  const double z_ratio = spec.right.impedance() / spec.left.impedance();
  return (z_ratio * t.sin_o * t.cos_i - t.sin_i * t.cos_o) * t.junction_factor -
         k * spec.half_length_m * t.cos_o * t.cos_i;
}

/// Residual for the junction-free line (continuity of u and of the current at
/// the segment interface). Zero exactly where the bare modes live.
inline double eigenvalue_residual_bare(double k, const CircuitSpec& spec) {
  const auto t = detail::residual_terms(k, spec, 0.0);
  const double z_ratio = spec.right.impedance() / spec.left.impedance();
  return z_ratio * t.sin_o * t.cos_i - t.sin_i * t.cos_o;
}

namespace detail {

inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, double flo) {
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Relative amplitude B from the current-matching condition, choosing the
/// numerically safe branch.
inline double relative_amplitude(const ResidualTerms& t,
                                 const CircuitSpec& spec, double inv_lj,
                                 bool has_junction) {
  const double z_ratio = spec.right.impedance() / spec.left.impedance();
  if (!has_junction) {
    // Continuity of u or of the current; pick the larger denominator.
    if (std::abs(t.sin_o) >= std::abs(t.cos_o)) return t.sin_i / t.sin_o;
    return z_ratio * t.cos_i / t.cos_o;
  }
  if (std::abs(t.cos_o) > 1e-10) return z_ratio * t.cos_i / t.cos_o;
  // cos_o ~ 0: fall back to the kink equation,
  // k cos_i / L0_l = (-omega^2 C_J + 1/L_J) (B sin_o - sin_i).
  const double jphys = -t.omega * t.omega * spec.junction.cj_f + inv_lj;
  const double denom = t.sin_o * jphys;
  if (std::abs(denom) < 1e-300)
    throw NumericalError("degenerate envelope at k with cos_o = 0");
  const double k = t.omega / spec.left.velocity();
  return (k * t.cos_i / spec.left.l_per_m + jphys * t.sin_i) / denom;
}

inline double unnormalized_self_product(const ModeEnvelope& m,
                                        const CircuitSpec& spec, double cj,
                                        double ci, double co) {
  const double ell = spec.half_length_m;
  const double xj = spec.junction_position_m;
  const double bl = m.k * ell - m.phi_in;
  const double br = -m.k_right * ell + m.phi_out;
  const double left = spec.left.c_per_m *
                      integral_sin_sin(m.k, bl, m.k, bl, -ell, xj);
  const double b2 = m.relative_amplitude * m.relative_amplitude;
  const double right = spec.right.c_per_m * b2 *
                       integral_sin_sin(m.k_right, br, m.k_right, br, xj, ell);
  const double u_in = -std::sin(m.phi_in);
  const double u_out = m.relative_amplitude * std::sin(m.phi_out);
  const double du = m.relative_amplitude *
                        std::sin(m.k_right * (xj - ell) + m.phi_out) -
                    std::sin(m.k * (xj + ell) - m.phi_in);
  return left + right + ci * u_in * u_in + co * u_out * u_out + cj * du * du;
}

inline std::vector<double> scan_roots(const std::function<double(double)>& f,
                                      double k_lo, double k_hi, int cells,
                                      int want) {
  std::vector<double> roots;
  double prev_k = k_lo;
  double prev_f = f(prev_k);
  const double dk = (k_hi - k_lo) / cells;
  for (int i = 1; i <= cells && static_cast<int>(roots.size()) < want; ++i) {
    const double cur_k = k_lo + i * dk;
    const double cur_f = f(cur_k);
    if (prev_f == 0.0) {
      roots.push_back(prev_k);
    } else if ((prev_f < 0.0) != (cur_f < 0.0)) {
      roots.push_back(bisect_root(f, prev_k, cur_k, prev_f));
    }
    prev_k = cur_k;
    prev_f = cur_f;
  }
  return roots;
}

/// Wavevectors of junction-blind modes: bare-line solutions with a current
/// node exactly at x_J, i.e. cos_i(k) = cos_o(k) = 0 coincidentally. These
/// are tangential (even-order) zeros of the cosine-multiplied residual, so
/// the sign-change scan cannot see them and they are located separately.
inline std::vector<double> blind_mode_wavevectors(const CircuitSpec& spec,
                                                  double inv_lj, double k_lo,
                                                  double k_hi, int cells,
                                                  int want) {
  auto cos_i = [&](double k) {
    return residual_terms(k, spec, inv_lj).cos_i;
  };
  std::vector<double> candidates = scan_roots(cos_i, k_lo, k_hi, cells, want);
  std::vector<double> blind;
  for (double k : candidates) {
    if (std::abs(residual_terms(k, spec, inv_lj).cos_o) < 1e-9)
      blind.push_back(k);
  }
  return blind;
}

inline ModeBasis build_basis(const CircuitSpec& spec, double flux,
                             bool has_junction, int count,
                             int scan_points_per_root) {
  const double ell = spec.half_length_m;
  const double vl = spec.left.velocity();
  const double vr = spec.right.velocity();
  const double ej = has_junction
                        ? effective_josephson_energy(spec.junction, flux)
                        : 0.0;
  if (has_junction && !(ej > 0.0))
    throw NumericalError("effective Josephson energy is not positive");
  const double inv_lj = has_junction
                            ? 1.0 / constants::josephson_inductance(ej)
                            : 0.0;
  const double cj = has_junction ? spec.junction.cj_f : 0.0;

  const double k_max = (count + 4) * std::numbers::pi / (2.0 * ell) *
                       std::max(1.0, vl / vr);
  const int cells = scan_points_per_root * (count + 4);
  const double k_min = k_max / cells * 1e-6;

  std::function<double(double)> f;
  if (has_junction) {
    f = [&](double k) { return eigenvalue_residual(k, spec, ej); };
  } else {
    f = [&](double k) { return eigenvalue_residual_bare(k, spec); };
  }

  struct Candidate {
    double k;
    bool blind;
  };
  std::vector<Candidate> raw;
  for (double k : scan_roots(f, k_min, k_max, cells, count + 4))
    raw.push_back({k, false});
  if (has_junction) {
    for (double k : blind_mode_wavevectors(spec, inv_lj, k_min, k_max, cells,
                                           count + 4))
      raw.push_back({k, true});
  }
  std::sort(raw.begin(), raw.end(),
            [](const Candidate& a, const Candidate& b) { return a.k < b.k; });
  // Merge near-coincident candidates (a tangential zero can numerically shed
  // one or two sign changes next to the blind root it belongs to).
  std::vector<Candidate> merged;
  for (const auto& c : raw) {
    if (!merged.empty() && c.k - merged.back().k < 1e-7 * c.k) {
      merged.back().blind = merged.back().blind || c.blind;
      continue;
    }
    merged.push_back(c);
  }

  ModeBasis basis;
  basis.circuit = spec;
  basis.flux = flux;
  basis.has_junction = has_junction;
  basis.ej_hz = ej;
  basis.inv_lj = inv_lj;
  basis.cj_f = cj;
  basis.total_capacitance = spec.left.c_per_m * (spec.junction_position_m + ell) +
                            spec.right.c_per_m * (ell - spec.junction_position_m) +
                            spec.ports.c_in_f + spec.ports.c_out_f + cj;

  for (const auto& cand : merged) {
    if (static_cast<int>(basis.modes.size()) >= count) break;
    const double k = cand.k;
    const auto t = residual_terms(k, spec, inv_lj);

    ModeEnvelope mode;
    mode.index = static_cast<int>(basis.modes.size()) + 1;
    mode.k = k;
    mode.k_right = t.k_right;
    mode.omega = t.omega;
    mode.phi_in = t.phi_in;
    mode.phi_out = t.phi_out;
    if (cand.blind) {
      // Current node at the junction: the envelope continues smoothly.
      mode.relative_amplitude = t.sin_i / t.sin_o;
    } else {
      mode.relative_amplitude =
          relative_amplitude(t, spec, inv_lj, has_junction);
    }
    mode.amplitude = 1.0;
    const double s = unnormalized_self_product(mode, spec, cj,
                                               spec.ports.c_in_f,
                                               spec.ports.c_out_f);
    mode.amplitude = std::sqrt(basis.total_capacitance / s);
    mode.delta_u = mode.amplitude *
                   (mode.relative_amplitude *
                        std::sin(t.k_right * (spec.junction_position_m - ell) +
                                 t.phi_out) -
                    std::sin(k * (spec.junction_position_m + ell) - t.phi_in));
    if (!has_junction || cand.blind) mode.delta_u = 0.0;
    basis.modes.push_back(mode);
  }

  if (static_cast<int>(basis.modes.size()) < count)
    throw NumericalError(
        "FewerRootsThanRequested: found " +
        std::to_string(basis.modes.size()) + " of " + std::to_string(count) +
        " modes below the scan window; widen the window");
  return basis;
}

}  // namespace detail

/// Solve the lowest `count` normal modes at dc flux bias `flux` (Phi_0 units).
inline ModeBasis find_modes(const CircuitSpec& spec, double flux, int count,
                            int scan_points_per_root = 2000) {
  if (count < 1) throw ValidationError("mode count must be >= 1");
  return detail::build_basis(spec, flux, /*has_junction=*/true, count,
                             scan_points_per_root);
}

/// Solve the modes of the same geometry with the junction removed entirely
/// (no E_J, no C_J). Reference for calibration and limit tests.
inline ModeBasis find_modes_bare(const CircuitSpec& spec, int count,
                                 int scan_points_per_root = 2000) {
  if (count < 1) throw ValidationError("mode count must be >= 1");
  return detail::build_basis(spec, 0.0, /*has_junction=*/false, count,
                             scan_points_per_root);
}

/// Capacitive inner product <u_m . u_n> in closed form; equals
/// C_Sigma delta_mn for a consistent basis.
inline double inner_product(int m, int n, const ModeBasis& basis) {
  const auto& um = basis.modes.at(m - 1);
  const auto& un = basis.modes.at(n - 1);
  const auto& spec = basis.circuit;
  const double ell = spec.half_length_m;
  const double xj = spec.junction_position_m;
  const double bm_l = um.k * ell - um.phi_in;
  const double bn_l = un.k * ell - un.phi_in;
  const double bm_r = -um.k_right * ell + um.phi_out;
  const double bn_r = -un.k_right * ell + un.phi_out;
  const double left = spec.left.c_per_m * um.amplitude * un.amplitude *
                      detail::integral_sin_sin(um.k, bm_l, un.k, bn_l, -ell, xj);
  const double right = spec.right.c_per_m * um.amplitude *
                       um.relative_amplitude * un.amplitude *
                       un.relative_amplitude *
                       detail::integral_sin_sin(um.k_right, bm_r, un.k_right,
                                                bn_r, xj, ell);
  const double edge_in = spec.ports.c_in_f * basis.mode_value(um, -ell) *
                         basis.mode_value(un, -ell);
  const double edge_out = spec.ports.c_out_f * basis.mode_value(um, ell) *
                          basis.mode_value(un, ell);
  return left + right + edge_in + edge_out + basis.cj_f * um.delta_u * un.delta_u;
}

/// Inductive inner product <du_m . du_n>; equals delta_mn / L_m with
/// L_m = 1/(C_Sigma omega_m^2).
inline double derivative_inner_product(int m, int n, const ModeBasis& basis) {
  const auto& um = basis.modes.at(m - 1);
  const auto& un = basis.modes.at(n - 1);
  const auto& spec = basis.circuit;
  const double ell = spec.half_length_m;
  const double xj = spec.junction_position_m;
  const double bm_l = um.k * ell - um.phi_in;
  const double bn_l = un.k * ell - un.phi_in;
  const double bm_r = -um.k_right * ell + um.phi_out;
  const double bn_r = -un.k_right * ell + un.phi_out;
  const double left = um.amplitude * un.amplitude * um.k * un.k /
                      spec.left.l_per_m *
                      detail::integral_cos_cos(um.k, bm_l, un.k, bn_l, -ell, xj);
  const double right = um.amplitude * um.relative_amplitude * un.amplitude *
                       un.relative_amplitude * um.k_right * un.k_right /
                       spec.right.l_per_m *
                       detail::integral_cos_cos(um.k_right, bm_r, un.k_right,
                                                bn_r, xj, ell);
  return left + right + basis.inv_lj * um.delta_u * un.delta_u;
}

/// Effective lumped parameters per mode, with both participation sum rules
/// asserted to 1e-6.
inline std::vector<ModeProperties> mode_properties(const ModeBasis& basis) {
  std::vector<ModeProperties> out;
  out.reserve(basis.modes.size());
  for (const auto& m : basis.modes) {
    ModeProperties p;
    p.index = m.index;
    p.omega = m.omega;
    const double c_sigma = basis.total_capacitance;
    p.mode_inductance = 1.0 / (c_sigma * m.omega * m.omega);
    const double du2 = m.delta_u * m.delta_u;
    p.resonator_capacitance = c_sigma - basis.cj_f * du2;
    const double inv_lres = c_sigma * m.omega * m.omega - du2 * basis.inv_lj;
    p.resonator_inductance = 1.0 / inv_lres;

    const double u_scale = std::abs(m.amplitude) *
                           std::max(1.0, std::abs(m.relative_amplitude));
    p.junction_coupled =
        basis.has_junction && std::abs(m.delta_u) >= 1e-9 * u_scale;
    if (p.junction_coupled) {
      p.rescaled_capacitance = c_sigma / du2;
      p.rescaled_inductance = p.mode_inductance * du2;
      p.eta_c = basis.cj_f / *p.rescaled_capacitance;
      p.eta_l = *p.rescaled_inductance * basis.inv_lj;
      p.charging_energy_hz = constants::elementary_charge *
                             constants::elementary_charge /
                             (2.0 * *p.rescaled_capacitance) / constants::planck;
      const double cap_rule = *p.eta_c + p.resonator_capacitance / c_sigma;
      const double ind_rule = *p.eta_l + p.mode_inductance * inv_lres;
      if (std::abs(cap_rule - 1.0) > 1e-6 || std::abs(ind_rule - 1.0) > 1e-6)
        throw NumericalError("SumRuleViolation: participation sum rules broken "
                             "for mode " + std::to_string(m.index) +
                             "; the basis upstream is inconsistent");
    }
    out.push_back(p);
  }
  return out;
}

/// Group velocity that places the junction-free fundamental of a uniform line
/// of impedance z0 at target_f1_hz. Exact for a uniform line: at fixed
/// frequency the port phases do not depend on v, so k is known in closed form.
inline double calibrate_velocity(double target_f1_hz, double half_length_m,
                                 double z0, double c_in_f, double c_out_f) {
  const double omega = constants::two_pi * target_f1_hz;
  const double phi_i = detail::port_phase(omega, c_in_f, z0);
  const double phi_o = detail::port_phase(omega, c_out_f, z0);
  const double k = (phi_i + phi_o) / (2.0 * half_length_m);
  return omega / k;
}

}  // namespace kerrline
