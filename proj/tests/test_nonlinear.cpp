#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kerrline/nonlinear.hpp"

using namespace kerrline;
using namespace kerrline::constants;

namespace {

CircuitSpec calibrated_line(double ci, double co, double xj, JunctionSpec j) {
  const double v = calibrate_velocity(4.95e9, 6e-3, 50.0, 1e-14, 1e-14);
  CircuitSpec s;
  s.half_length_m = 6e-3;
  s.junction_position_m = xj;
  s.left = {1.0 / (v * 50.0), 50.0 / v};
  s.right = s.left;
  s.ports = {ci, co, 50.0};
  s.junction = j;
  return s;
}

CircuitSpec converter_circuit() {
  return calibrated_line(1e-14, 1e-14, 3e-3,
                         {JunctionKind::squid, 0.0, 6.36e11, 0.0, 2e-15});
}

CircuitSpec cat_circuit() {
  return calibrated_line(2.5e-15, 2.5e-15, 4.5e-3,
                         {JunctionKind::squid, 0.0, 6.22e11, 0.05, 1e-14});
}

}  // namespace

TEST_CASE("three-mode converter benchmark") {
  const auto spec = converter_circuit();
  const auto basis = find_modes(spec, 0.37, 3);
  const auto props = mode_properties(basis);
  const auto nc = nonlinear_couplings(props);
  REQUIRE(nc.mode_indices.size() == 3);

  // Self-Kerr strengths of the three lowest modes, MHz.
  CHECK(nc.self_kerr(0) / two_pi / 1e6 == doctest::Approx(0.211).epsilon(0.02));
  CHECK(nc.self_kerr(1) / two_pi / 1e6 == doctest::Approx(1.36).epsilon(0.02));
  CHECK(nc.self_kerr(2) / two_pi / 1e6 == doctest::Approx(0.358).epsilon(0.02));

  // Pairwise two-photon pump amplitudes at Phi_rf = 0.02 Phi_0, MHz.
  const auto pa = pump_amplitudes(basis, props, 0.02, 0.0);
  CHECK(pa.two_photon[0][1] / two_pi / 1e6 == doctest::Approx(75.65).epsilon(0.01));
  CHECK(pa.two_photon[0][2] / two_pi / 1e6 == doctest::Approx(54.16).epsilon(0.01));
  CHECK(pa.two_photon[1][2] / two_pi / 1e6 == doctest::Approx(86.28).epsilon(0.01));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(pa.two_photon[a][b] == doctest::Approx(pa.two_photon[b][a]));
}

TEST_CASE("closed-form pump amplitude matches the flux-derivative route") {
  const auto spec = converter_circuit();
  for (double flux : {0.20, 0.26, 0.33, 0.40, 0.45}) {
    CAPTURE(flux);
    const auto basis = find_modes(spec, flux, 2);
    const auto props = mode_properties(basis);
    const auto pa = pump_amplitudes(basis, props, 0.02, 0.0);
    const double fd = pump_amplitude_from_derivatives(spec, 1, 2, flux, 0.02);
    CHECK(fd == doctest::Approx(pa.two_photon[0][1]).epsilon(0.05));
  }
}

TEST_CASE("coupling algebra: cross-Kerr, beam splitter, shifted frequencies") {
  const auto basis = find_modes(converter_circuit(), 0.3, 3);
  const auto nc = nonlinear_couplings(mode_properties(basis));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b)
        CHECK(nc.kerr[a][b] ==
              doctest::Approx(2.0 * std::sqrt(nc.kerr[a][a] * nc.kerr[b][b]))
                  .epsilon(1e-12));
      // The Kronecker prefactor only involves the first two indices, so the
      // amplitude is symmetric in the last two slots away from the diagonal.
      for (int c = 0; c < 3; ++c)
        if (b != a && c != a)
          CHECK(nc.beam_splitter(a, b, c) ==
                doctest::Approx(nc.beam_splitter(a, c, b)).epsilon(1e-12));
      if (b != a)  // zeta_aab carries the 1/2 relative to zeta_aba
        CHECK(nc.beam_splitter(a, a, b) ==
              doctest::Approx(0.5 * nc.beam_splitter(a, b, a)).epsilon(1e-12));
      const double factor = (a == b) ? 0.5 : 1.0;
      const double quartic = nc.kerr[a][a] * nc.kerr[a][a] * nc.kerr[b][b] *
                             nc.kerr[b][b];
      CHECK(std::pow(nc.beam_splitter(a, b, b) / factor, 4) ==
            doctest::Approx(quartic).epsilon(1e-9));
    }
    double shift = 0.0;
    for (int b = 0; b < 3; ++b) shift += nc.kerr[a][b];
    CHECK(nc.omega_shifted[a] == doctest::Approx(nc.omega[a] - shift));
  }
}

TEST_CASE("Kerr tunability of the asymmetric SQUID") {
  const auto spec = cat_circuit();
  const auto weak = nonlinear_couplings(mode_properties(find_modes(spec, 0.0, 1)));
  const auto strong =
      nonlinear_couplings(mode_properties(find_modes(spec, 0.5, 1)));
  CHECK(weak.self_kerr(0) / two_pi / 1e6 < 0.01);
  CHECK(strong.self_kerr(0) / two_pi / 1e6 ==
        doctest::Approx(20.88).epsilon(0.02));
  // Monotone growth of K_11 from zero bias to the half quantum.
  double prev = 0.0;
  for (double flux : {0.0, 0.15, 0.30, 0.42, 0.48, 0.5}) {
    const auto nc = nonlinear_couplings(mode_properties(find_modes(spec, flux, 1)));
    CHECK(nc.self_kerr(0) > prev);
    prev = nc.self_kerr(0);
  }
}

TEST_CASE("port decay rates scale with the square of the coupling capacitor") {
  auto spec = cat_circuit();
  spec.ports.c_in_f = spec.ports.c_out_f = 1e-16;  // perturbatively small
  const auto kappa_1 = decay_rates(find_modes(spec, 0.5, 1));
  spec.ports.c_in_f = spec.ports.c_out_f = 2e-16;
  const auto kappa_2 = decay_rates(find_modes(spec, 0.5, 1));
  CHECK(kappa_2[0] / kappa_1[0] == doctest::Approx(4.0).epsilon(0.01));

  // Benchmark value for the shipped cat circuit.
  const auto kappa = decay_rates(find_modes(cat_circuit(), 0.5, 1));
  CHECK(kappa[0] / two_pi / 1e6 == doctest::Approx(0.0961).epsilon(0.02));
}

TEST_CASE("critical photon number: consistent forms and regimes") {
  const auto spec = cat_circuit();
  for (double flux : {0.0, 0.05, 0.1, 0.18, 0.25, 0.32, 0.38, 0.44, 0.48, 0.5}) {
    CAPTURE(flux);
    const auto basis = find_modes(spec, flux, 1);
    const auto props = mode_properties(basis);
    CHECK_NOTHROW(critical_photon_number(props[0], basis.ej_hz));
  }
  const auto strong = find_modes(spec, 0.5, 1);
  const double nc_strong =
      critical_photon_number(mode_properties(strong)[0], strong.ej_hz);
  CHECK(nc_strong == doctest::Approx(8.14).epsilon(0.02));
  const auto weak = find_modes(spec, 0.0, 1);
  const double nc_weak =
      critical_photon_number(mode_properties(weak)[0], weak.ej_hz);
  CHECK(nc_weak == doctest::Approx(126.0).epsilon(0.02));
  CHECK(nc_weak > 10.0 * nc_strong);  // blockade needs the suppressed E_J
}

TEST_CASE("error paths") {
  // Flux pumping is only defined for a SQUID.
  const auto single = calibrated_line(
      1e-14, 1e-14, 0.0, {JunctionKind::single, 6.36e11, 0.0, 0.0, 2e-15});
  const auto basis = find_modes(single, 0.0, 2);
  const auto props = mode_properties(basis);
  CHECK_THROWS_AS(pump_amplitudes(basis, props, 0.02, 0.0), ValidationError);
  CHECK_THROWS_AS(pump_amplitude_from_derivatives(single, 1, 2, 0.3, 0.02),
                  ValidationError);

  // The derivative identity breaks at the half quantum and for large d.
  const auto squid = converter_circuit();
  CHECK_THROWS_AS(pump_amplitude_from_derivatives(squid, 1, 2, 0.5, 0.02),
                  NumericalError);
  auto lopsided = squid;
  lopsided.junction.asymmetry = 0.3;
  CHECK_THROWS_AS(pump_amplitude_from_derivatives(lopsided, 1, 2, 0.3, 0.02),
                  ValidationError);

  // A junction-blind mode has no critical photon number.
  const auto centered = calibrated_line(
      1e-14, 1e-14, 0.0, {JunctionKind::single, 6.36e11, 0.0, 0.0, 2e-15});
  const auto blind = mode_properties(find_modes(centered, 0.0, 2));
  REQUIRE(!blind[1].junction_coupled);
  CHECK_THROWS_AS(critical_photon_number(blind[1], 6.36e11), ValidationError);
}
