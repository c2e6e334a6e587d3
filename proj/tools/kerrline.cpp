// kerrline: compute normal modes, Kerr couplings, pump amplitudes and open
// dynamics of a transmission-line resonator with an embedded junction/SQUID,
// and write the results as deterministic CSV/JSON artifacts.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrline/circuit.hpp"
#include "kerrline/constants.hpp"
#include "kerrline/dynamics.hpp"
#include "kerrline/effective_models.hpp"
#include "kerrline/errors.hpp"
#include "kerrline/io.hpp"
#include "kerrline/modes.hpp"
#include "kerrline/nonlinear.hpp"

namespace {

using namespace kerrline;
using nlohmann::ordered_json;

constexpr double kTwoPi = constants::two_pi;

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  int modes = 3;
  int grid = 101;
  int fock = 0;
  int threads = 0;
  double flux = 0.0;
  double flux_min = 0.0;
  double flux_max = 0.5;
  double flux_rf = 0.02;
  double alpha = 2.0;
  double epsilon_mhz = 2.0;
  double kerr_mhz = 0.0;   // 0: derive from the circuit
  double kappa_mhz = 0.0;  // 0: derive from the circuit
  double t_end_ns = 1000.0;
  double ramp_ns = 4.0;
  double flux_start = 0.3;
  double flux_peak = 0.5;
  int wigner_res = 101;
  bool constant_kappa = false;
};

int thread_count(const Options& opt, int work_items) {
  int n = opt.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("KERRLINE_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::min(n, std::max(1, work_items));
}

/// Ordered parallel map: run fn(i) for i in [0, count) on a thread pool and
/// leave the results in index order.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Parse the config, apply --set overrides (dotted paths, values parsed as
/// JSON scalars), and validate the merged document.
CircuitSpec load_config(const Options& opt, std::string* raw_out = nullptr) {
  if (opt.config.empty()) throw ValidationError("--config is required");
  std::string raw = io::read_file(opt.config);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config parse error in " + opt.config + ": " +
                          e.what());
  }
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--set expects key=value, got: " + kv);
    std::string pointer = "/" + kv.substr(0, eq);
    for (auto& c : pointer)
      if (c == '.') c = '/';
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(kv.substr(eq + 1));
    } catch (const nlohmann::json::parse_error&) {
      value = kv.substr(eq + 1);  // unquoted strings, e.g. junction.type=squid
    }
    doc[nlohmann::json::json_pointer(pointer)] = value;
    raw += ";" + kv;  // overrides are part of the config identity
  }
  if (raw_out) *raw_out = raw;
  return load_and_validate_spec(doc);
}

std::string out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out);
  return (std::filesystem::path(opt.out) / name).string();
}

double kerr_of(const ModeProperties& p) {
  return p.junction_coupled
             ? kTwoPi * (*p.charging_energy_hz) * (*p.eta_l)
             : 0.0;
}

int cmd_validate(const Options& opt) {
  const CircuitSpec spec = load_config(opt);
  const double ej = effective_josephson_energy(spec.junction, opt.flux);
  ordered_json doc;
  doc["z0_left_ohm"] = spec.left.impedance();
  doc["z0_right_ohm"] = spec.right.impedance();
  doc["v_left_m_s"] = spec.left.velocity();
  doc["v_right_m_s"] = spec.right.velocity();
  doc["c_sigma_f"] = spec.total_capacitance();
  doc["ej_hz"] = ej;
  doc["l_j_h"] = constants::josephson_inductance(ej);
  doc["flux"] = opt.flux;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_spectrum(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  const auto basis = find_modes(spec, opt.flux, opt.modes);
  const auto props = mode_properties(basis);
  const auto kappas = decay_rates(basis);

  io::write_json(io::basis_to_json(basis), out_path(opt, "modes.json"));
  io::write_envelopes(basis, std::max(opt.grid, 2),
                      out_path(opt, "envelopes.csv"));
  io::CsvWriter csv(out_path(opt, "properties.csv"),
                    {"m", "omega_ghz", "delta_u", "eta_c", "eta_l", "ec_mhz",
                     "k_mm_mhz", "kappa_mhz"});
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& p = props[i];
    csv.row({double(p.index), p.omega / kTwoPi / 1e9, basis.modes[i].delta_u,
             p.eta_c.value_or(0.0), p.eta_l.value_or(0.0),
             p.charging_energy_hz.value_or(0.0) / 1e6, kerr_of(p) / kTwoPi / 1e6,
             kappas[i] / kTwoPi / 1e6});
  }
  auto man = io::manifest("spectrum", opt.config, raw);
  man["parameters"] = {{"flux", opt.flux}, {"modes", opt.modes},
                       {"grid", opt.grid}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

/// One row of the sweep tables: frequencies, Kerr matrix, beam-splitter and
/// pump amplitudes (SQUID only), decay rates. Junction-blind modes carry
/// zeros in the nonlinear columns.
std::vector<double> sweep_row(const CircuitSpec& spec, double flux,
                              double flux_rf, int n_modes) {
  const auto basis = find_modes(spec, flux, n_modes);
  const auto props = mode_properties(basis);
  const auto kappas = decay_rates(basis);
  std::vector<double> row;
  for (const auto& p : props) row.push_back(p.omega / kTwoPi / 1e9);
  std::vector<double> self(n_modes);
  for (int m = 0; m < n_modes; ++m) self[m] = kerr_of(props[m]);
  for (int m = 0; m < n_modes; ++m)
    for (int n = m; n < n_modes; ++n)
      row.push_back((m == n ? self[m] : 2.0 * std::sqrt(self[m] * self[n])) /
                    kTwoPi / 1e6);
  for (int m = 0; m < n_modes; ++m)
    for (int n = 0; n < n_modes; ++n) {
      if (m == n) continue;  // zeta_mmn with m != n
      const double z =
          0.5 * std::sqrt(std::sqrt(self[m] * self[m] * self[m] * self[n]));
      row.push_back(2.0 * z / kTwoPi / 1e6);  // (1 - delta/2) factor = 1
    }
  if (spec.junction.kind == JunctionKind::squid) {
    const auto pump = pump_amplitudes(basis, props, flux_rf, 0.0);
    std::vector<double> g1(n_modes, 0.0);
    std::vector<std::vector<double>> g2(n_modes,
                                        std::vector<double>(n_modes, 0.0));
    for (std::size_t i = 0; i < pump.mode_indices.size(); ++i) {
      g1[pump.mode_indices[i] - 1] = pump.one_photon[i];
      for (std::size_t j = 0; j < pump.mode_indices.size(); ++j)
        g2[pump.mode_indices[i] - 1][pump.mode_indices[j] - 1] =
            pump.two_photon[i][j];
    }
    for (int m = 0; m < n_modes; ++m) row.push_back(g1[m] / kTwoPi / 1e6);
    for (int m = 0; m < n_modes; ++m)
      for (int n = m; n < n_modes; ++n) row.push_back(g2[m][n] / kTwoPi / 1e6);
  }
  for (int m = 0; m < n_modes; ++m) row.push_back(kappas[m] / kTwoPi / 1e6);
  return row;
}

std::vector<std::string> sweep_header(const CircuitSpec& spec, int n_modes,
                                      const std::string& axis) {
  std::vector<std::string> h{axis};
  for (int m = 1; m <= n_modes; ++m)
    h.push_back("omega_" + std::to_string(m) + "_ghz");
  for (int m = 1; m <= n_modes; ++m)
    for (int n = m; n <= n_modes; ++n)
      h.push_back("k_" + std::to_string(m) + std::to_string(n) + "_mhz");
  for (int m = 1; m <= n_modes; ++m)
    for (int n = 1; n <= n_modes; ++n) {
      if (m == n) continue;
      h.push_back("zeta_" + std::to_string(m) + std::to_string(m) +
                  std::to_string(n) + "_mhz");
    }
  if (spec.junction.kind == JunctionKind::squid) {
    for (int m = 1; m <= n_modes; ++m)
      h.push_back("g_" + std::to_string(m) + "_mhz");
    for (int m = 1; m <= n_modes; ++m)
      for (int n = m; n <= n_modes; ++n)
        h.push_back("g_" + std::to_string(m) + std::to_string(n) + "_mhz");
  }
  for (int m = 1; m <= n_modes; ++m)
    h.push_back("kappa_" + std::to_string(m) + "_mhz");
  return h;
}

int cmd_sweep_flux(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  const int n = std::max(opt.grid, 2);
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, thread_count(opt, n), [&](int i) {
    const double flux =
        opt.flux_min + (opt.flux_max - opt.flux_min) * i / (n - 1);
    rows[i] = sweep_row(spec, flux, opt.flux_rf, opt.modes);
    rows[i].insert(rows[i].begin(), flux);
  });
  io::CsvWriter csv(out_path(opt, "sweep_flux.csv"),
                    sweep_header(spec, opt.modes, "phi_x"));
  for (auto& r : rows) csv.row(r);
  auto man = io::manifest("sweep-flux", opt.config, raw);
  man["parameters"] = {{"modes", opt.modes}, {"grid", n},
                       {"flux_min", opt.flux_min}, {"flux_max", opt.flux_max},
                       {"flux_rf", opt.flux_rf}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_sweep_position(const Options& opt) {
  std::string raw;
  const CircuitSpec base = load_config(opt, &raw);
  const int n = std::max(opt.grid, 2);
  const double ell = base.half_length_m;
  const double margin = 2.0 * ell / (n + 1);
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, thread_count(opt, n), [&](int i) {
    CircuitSpec spec = base;
    spec.junction_position_m =
        -ell + margin + (2.0 * ell - 2.0 * margin) * i / (n - 1);
    rows[i] = sweep_row(spec, opt.flux, opt.flux_rf, opt.modes);
    rows[i].insert(rows[i].begin(), spec.junction_position_m * 1e3);
  });
  io::CsvWriter csv(out_path(opt, "sweep_position.csv"),
                    sweep_header(base, opt.modes, "x_j_mm"));
  for (auto& r : rows) csv.row(r);
  auto man = io::manifest("sweep-position", opt.config, raw);
  man["parameters"] = {{"modes", opt.modes}, {"grid", n}, {"flux", opt.flux},
                       {"flux_rf", opt.flux_rf}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_jpc(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  const auto basis = find_modes(spec, opt.flux, opt.modes);
  const auto props = mode_properties(basis);
  const auto nc = nonlinear_couplings(props);
  const auto pump = pump_amplitudes(basis, props, opt.flux_rf, 0.0);

  io::CsvWriter csv(out_path(opt, "jpc.csv"),
                    {"m", "n", "omega_m_ghz", "omega_n_ghz", "k_mn_mhz",
                     "g_mn_mhz", "omega_sum_ghz", "omega_diff_ghz"});
  const std::size_t count = nc.mode_indices.size();
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a; b < count; ++b)
      csv.row({double(nc.mode_indices[a]), double(nc.mode_indices[b]),
               nc.omega[a] / kTwoPi / 1e9, nc.omega[b] / kTwoPi / 1e9,
               nc.kerr[a][b] / kTwoPi / 1e6,
               pump.two_photon[a][b] / kTwoPi / 1e6,
               (nc.omega[a] + nc.omega[b]) / kTwoPi / 1e9,
               std::abs(nc.omega[a] - nc.omega[b]) / kTwoPi / 1e9});

  auto man = io::manifest("jpc", opt.config, raw);
  man["parameters"] = {{"flux", opt.flux}, {"flux_rf", opt.flux_rf},
                       {"modes", opt.modes}};
  for (std::size_t a = 0; a < count; ++a) {
    const std::string m = std::to_string(nc.mode_indices[a]);
    man["results"]["k_" + m + m + "_mhz"] = nc.kerr[a][a] / kTwoPi / 1e6;
    man["results"]["g_" + m + "_mhz"] = pump.one_photon[a] / kTwoPi / 1e6;
  }
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_blockade(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  double kerr, kappa, omega_r;
  if (opt.kerr_mhz > 0.0 && opt.kappa_mhz > 0.0) {
    kerr = kTwoPi * opt.kerr_mhz * 1e6;
    kappa = kTwoPi * opt.kappa_mhz * 1e6;
    omega_r = kTwoPi * 5e9;  // placeholder carrier; only detuning matters
  } else {
    const auto basis = find_modes(spec, opt.flux, 1);
    const auto props = mode_properties(basis);
    if (!props[0].junction_coupled)
      throw NumericalError("first mode is junction-blind; no Kerr blockade");
    kerr = kerr_of(props[0]);
    kappa = opt.kappa_mhz > 0.0 ? kTwoPi * opt.kappa_mhz * 1e6
                                : decay_rates(basis)[0];
    omega_r = props[0].omega;
  }
  const double epsilon = kTwoPi * opt.epsilon_mhz * 1e6;
  const int n_fock = opt.fock > 0 ? opt.fock : 15;
  const auto traj = simulate_blockade(omega_r, kerr, kappa, epsilon,
                                      opt.t_end_ns * 1e-9, n_fock);
  io::write_trajectory(traj, out_path(opt, "trajectory.csv"));

  double n_max = 0.0;
  for (double v : traj.n_mean) n_max = std::max(n_max, v);
  auto man = io::manifest("blockade", opt.config, raw);
  man["parameters"] = {{"flux", opt.flux},
                       {"kerr_mhz", kerr / kTwoPi / 1e6},
                       {"kappa_mhz", kappa / kTwoPi / 1e6},
                       {"epsilon_mhz", opt.epsilon_mhz},
                       {"t_end_ns", opt.t_end_ns},
                       {"fock", n_fock},
                       {"dt_s", traj.dt_used}};
  man["results"] = {{"n_max", n_max},
                    {"n_final", traj.n_mean.back()},
                    {"p1_final", traj.p1.back()},
                    {"max_trace_drift", traj.max_trace_drift}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_cat(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  if (spec.junction.kind != JunctionKind::squid)
    throw ValidationError("NotASquid: the cat experiment needs a flux-tunable "
                          "junction");
  // Tabulate K and kappa over the pulse's flux range, then interpolate.
  const int np = std::max(opt.grid, 11);
  std::vector<double> ks(np), kaps(np);
  const double lo = std::min(opt.flux_start, opt.flux_peak);
  const double hi = std::max(opt.flux_start, opt.flux_peak);
  parallel_for(np, thread_count(opt, np), [&](int i) {
    const double flux = lo + (hi - lo) * i / (np - 1);
    const auto basis = find_modes(spec, flux, 1);
    const auto props = mode_properties(basis);
    if (!props[0].junction_coupled)
      throw NumericalError("first mode is junction-blind along the pulse");
    ks[i] = kerr_of(props[0]);
    kaps[i] = decay_rates(basis)[0];
  });
  auto interp = [lo, hi](const std::vector<double>& y) {
    return [lo, hi, y](double phi) {
      if (phi <= lo) return y.front();
      if (phi >= hi) return y.back();
      const double s = (phi - lo) / (hi - lo) * (y.size() - 1);
      std::size_t i = std::min<std::size_t>(std::size_t(s), y.size() - 2);
      const double w = s - i;
      return y[i] * (1.0 - w) + y[i + 1] * w;
    };
  };
  auto kappa_fn = opt.constant_kappa
                      ? std::function<double(double)>(
                            [k = kaps.back()](double) { return k; })
                      : std::function<double(double)>(interp(kaps));

  FluxPulse pulse;
  pulse.phi_start = opt.flux_start;
  pulse.phi_peak = opt.flux_peak;
  pulse.t_ramp = opt.ramp_ns * 1e-9;
  const int n_fock = opt.fock > 0 ? opt.fock : 40;
  const auto result =
      simulate_cat(interp(ks), kappa_fn, pulse, opt.alpha, n_fock);

  io::write_trajectory(result.trajectory, out_path(opt, "trajectory.csv"));
  const double extent = std::sqrt(2.0) * opt.alpha + 3.0;
  io::write_wigner(wigner(result.rho_final, extent, opt.wigner_res),
                   out_path(opt, "wigner.csv"));

  auto man = io::manifest("cat", opt.config, raw);
  man["parameters"] = {{"alpha", opt.alpha},
                       {"fock", n_fock},
                       {"flux_start", opt.flux_start},
                       {"flux_peak", opt.flux_peak},
                       {"ramp_ns", opt.ramp_ns},
                       {"kerr_peak_mhz", ks.back() / kTwoPi / 1e6},
                       {"kappa_peak_mhz", kaps.back() / kTwoPi / 1e6},
                       {"constant_kappa", opt.constant_kappa},
                       {"wigner_extent", extent},
                       {"wigner_res", opt.wigner_res}};
  man["results"] = {{"fidelity", result.fidelity},
                    {"tau_used_ns", result.tau_used * 1e9},
                    {"theta_opt", result.theta_opt},
                    {"max_trace_drift", result.trajectory.max_trace_drift}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_ultrastrong(const Options& opt) {
  std::string raw;
  const CircuitSpec spec = load_config(opt, &raw);
  const auto crossing =
      avoided_crossing(spec, opt.flux_min, opt.flux_max, std::max(opt.grid, 5));

  io::CsvWriter csv(out_path(opt, "ultrastrong.csv"),
                    {"phi_x", "omega_1_ghz", "omega_2_ghz", "omega_r_eff_ghz",
                     "omega_p_eff_ghz", "k_11_mhz", "k_22_mhz", "eta_l_1",
                     "eta_l_2"});
  for (const auto& pt : crossing.sweep) {
    const auto eff = end_coupled_model(spec, pt.flux);
    csv.row({pt.flux, pt.omega1 / kTwoPi / 1e9, pt.omega2 / kTwoPi / 1e9,
             eff.omega_r / kTwoPi / 1e9, eff.omega_p / kTwoPi / 1e9,
             pt.kerr1 / kTwoPi / 1e6, pt.kerr2 / kTwoPi / 1e6, pt.eta1,
             pt.eta2});
  }
  const auto eff = end_coupled_model(spec, crossing.flux_at_minimum);
  auto man = io::manifest("ultrastrong", opt.config, raw);
  man["parameters"] = {{"flux_min", opt.flux_min}, {"flux_max", opt.flux_max},
                       {"grid", std::max(opt.grid, 5)}};
  man["results"] = {{"flux_at_minimum", crossing.flux_at_minimum},
                    {"g_over_omega_p", crossing.report.ratio},
                    {"g_mhz", crossing.report.g / kTwoPi / 1e6},
                    {"omega_p_ghz", crossing.report.omega_p / kTwoPi / 1e9},
                    {"end_coupled_ratio", eff.ratio},
                    {"end_coupled_note", eff.note}};
  io::write_json(man, out_path(opt, "manifest.json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal modes, Kerr couplings and open dynamics of a "
               "junction-embedded transmission-line resonator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "circuit config JSON");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--set", opt.overrides,
                    "config override, dotted path key=value (repeatable)");
    sub->add_option("--modes", opt.modes, "number of modes");
    sub->add_option("--grid", opt.grid, "grid resolution");
    sub->add_option("--fock", opt.fock, "Fock-space dimension");
    sub->add_option("--threads", opt.threads,
                    "worker threads (default: KERRLINE_THREADS or all cores)");
    sub->add_option("--flux", opt.flux, "dc flux bias, units of Phi_0");
    return sub;
  };

  add_common(app.add_subcommand("validate", "check a config and print the "
                                            "derived line constants"));
  add_common(app.add_subcommand("spectrum", "modes, envelopes and per-mode "
                                            "properties at one flux bias"));
  auto* sflux = add_common(
      app.add_subcommand("sweep-flux", "couplings vs dc flux"));
  sflux->add_option("--flux-min", opt.flux_min, "sweep start");
  sflux->add_option("--flux-max", opt.flux_max, "sweep end");
  sflux->add_option("--flux-rf", opt.flux_rf, "rf flux amplitude");
  auto* spos = add_common(
      app.add_subcommand("sweep-position", "couplings vs junction position"));
  spos->add_option("--flux-rf", opt.flux_rf, "rf flux amplitude");
  auto* jpc = add_common(
      app.add_subcommand("jpc", "parametric-converter operating point"));
  jpc->add_option("--flux-rf", opt.flux_rf, "rf flux amplitude");
  auto* blockade = add_common(
      app.add_subcommand("blockade", "driven Kerr mode from vacuum"));
  blockade->add_option("--epsilon-mhz", opt.epsilon_mhz, "drive/2pi in MHz");
  blockade->add_option("--kerr-mhz", opt.kerr_mhz,
                       "override K/2pi in MHz (default: from circuit)");
  blockade->add_option("--kappa-mhz", opt.kappa_mhz,
                       "override kappa/2pi in MHz (default: from circuit)");
  blockade->add_option("--t-end-ns", opt.t_end_ns, "evolution time");
  auto* cat = add_common(
      app.add_subcommand("cat", "flux-pulsed cat-state generation"));
  cat->add_option("--alpha", opt.alpha, "initial coherent amplitude");
  cat->add_option("--flux-start", opt.flux_start, "pulse baseline flux");
  cat->add_option("--flux-peak", opt.flux_peak, "pulse peak flux");
  cat->add_option("--ramp-ns", opt.ramp_ns, "raised-cosine ramp time");
  cat->add_option("--wigner-res", opt.wigner_res, "Wigner grid resolution");
  cat->add_flag("--constant-kappa", opt.constant_kappa,
                "hold kappa at its peak-flux value (ablation)");
  auto* ultra = add_common(
      app.add_subcommand("ultrastrong", "avoided-crossing g extraction"));
  ultra->add_option("--flux-min", opt.flux_min, "sweep start");
  ultra->add_option("--flux-max", opt.flux_max, "sweep end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "validate") return cmd_validate(opt);
    if (sub == "spectrum") return cmd_spectrum(opt);
    if (sub == "sweep-flux") return cmd_sweep_flux(opt);
    if (sub == "sweep-position") return cmd_sweep_position(opt);
    if (sub == "jpc") return cmd_jpc(opt);
    if (sub == "blockade") return cmd_blockade(opt);
    if (sub == "cat") return cmd_cat(opt);
    if (sub == "ultrastrong") return cmd_ultrastrong(opt);
    std::cerr << "unknown subcommand: " << sub << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
