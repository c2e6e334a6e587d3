#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "kerrline/effective_models.hpp"

using namespace kerrline;
using namespace kerrline::constants;

namespace {

CircuitSpec standard_line(double cj, double xj, JunctionSpec j,
                          double ports = 1e-14, double half_length = 6e-3) {
  CircuitSpec s;
  s.half_length_m = half_length;
  s.junction_position_m = xj;
  s.left.c_per_m = s.right.c_per_m = 1.6668363601e-10;
  s.left.l_per_m = s.right.l_per_m = 4.1670909004e-07;
  s.ports.c_in_f = s.ports.c_out_f = ports;
  s.ports.z_ext_ohm = 50.0;
  s.junction = j;
  s.junction.cj_f = cj;
  return s;
}

/// Independent charge-basis diagonalization written directly in the test, as
/// an oracle for the library's E_L = 0 path.
std::vector<double> oracle_charge_levels(double ec_hz, double ej_hz, int cut) {
  const int dim = 2 * cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i - cut;
    h(i, i) = 4.0 * ec_hz * n * n;
    if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = -0.5 * ej_hz;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  return {solver.eigenvalues().data(),
          solver.eigenvalues().data() + solver.eigenvalues().size()};
}

}  // namespace

TEST_CASE("phase-grid diagonalization reproduces the exact oscillator") {
  // E_J = 0 leaves a pure harmonic oscillator: levels sqrt(8 E_C E_L)(n+1/2).
  InlineTransmonModel ho{0.25e9, 10e9, 0.0};
  const auto spectrum = inline_transmon_spectrum(ho, 201);
  const double exact = std::sqrt(8.0 * 0.25e9 * 10e9);
  CHECK(std::abs(spectrum.omega01 / (two_pi * exact) - 1.0) < 1e-12);
  CHECK(std::abs(spectrum.anharmonicity / spectrum.omega01) < 1e-10);
  for (int n = 0; n < 5; ++n) {
    const double gap = spectrum.levels_hz[n + 1] - spectrum.levels_hz[n];
    CHECK(std::abs(gap / exact - 1.0) < 1e-10);
  }
}

TEST_CASE("pure transmon levels match an independent charge-basis oracle") {
  InlineTransmonModel m{0.25e9, 0.0, 12.5e9};  // E_J/E_C = 50
  const auto spectrum = inline_transmon_spectrum(m, 61);
  const auto oracle = oracle_charge_levels(0.25e9, 12.5e9, 30);
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(spectrum.levels_hz[n] - oracle[n]) <
          1e-6 * std::abs(oracle[n] - oracle[0] + 1e9));
  }
  // Deep transmon regime: the weak-anharmonicity estimates are close.
  CHECK(spectrum.omega01 ==
        doctest::Approx(spectrum.omega01_estimate).epsilon(0.07));
  CHECK(spectrum.anharmonicity ==
        doctest::Approx(spectrum.anharmonicity_estimate).epsilon(0.15));
  CHECK(spectrum.anharmonicity < 0.0);
}

TEST_CASE("phase-grid result is converged under basis refinement") {
  InlineTransmonModel m{0.3e9, 2e9, 20e9};
  const auto coarse = inline_transmon_spectrum(m, 201);
  const auto fine = inline_transmon_spectrum(m, 401);
  CHECK(std::abs(fine.omega01 / coarse.omega01 - 1.0) < 1e-8);
  CHECK(std::abs(fine.anharmonicity - coarse.anharmonicity) <
        1e-8 * fine.omega01);
}

TEST_CASE("shrinking the resonator recovers the lumped transmon") {
  // Near-open ports so the lumped charging energy is not polluted by the
  // port capacitors.
  JunctionSpec j{JunctionKind::single, 5e10, 0.0, 0.0, 1e-14};
  const double c0 = 1.6668363601e-10;
  double prev_kerr_err = 1e9;
  double ec_ratio_shortest = 0.0;
  for (double ell : {6e-3, 1e-3, 2e-4, 2.5e-5}) {
    CAPTURE(ell);
    const auto spec = standard_line(1e-14, 0.0, j, 1e-17, ell);
    const auto basis = find_modes(spec, 0.0, 1);
    const auto model = inline_transmon_from_basis(basis);
    const auto spectrum = inline_transmon_spectrum(model);
    const auto props = mode_properties(basis);

    // The harmonic estimate built from the reduced model reproduces the mode
    // frequency identically: the reduction preserves omega^2 = 1/(L' C').
    CHECK(std::abs(props[0].omega / spectrum.omega01_estimate - 1.0) < 1e-9);
    // The anharmonic junction pulls the diagonalized 0-1 transition below the
    // linearized frequency.
    CHECK(spectrum.omega01 < props[0].omega);

    // Self-Kerr approaches 2 pi E_C,T E_J/(E_J + E_L) with the lumped
    // charging energy E_C,T built from C_T = 2 l C0/4 + C_J.
    const double ct = 2.0 * ell * c0 / 4.0 + spec.junction.cj_f;
    const double ec_t = elementary_charge * elementary_charge / (2.0 * ct) / planck;
    ec_ratio_shortest = model.ec_hz / ec_t;
    const double k11 = two_pi * (*props[0].charging_energy_hz) * (*props[0].eta_l);
    const double target = two_pi * ec_t * model.ej_hz / (model.ej_hz + model.el_hz);
    const double kerr_err = std::abs(k11 / target - 1.0);
    CHECK(kerr_err < prev_kerr_err + 1e-12);
    prev_kerr_err = kerr_err;
  }
  CHECK(prev_kerr_err < 0.02);
  // At the shortest length the distributed charging energy matches the
  // lumped-element C_T = 2 l C0/4 + C_J form.
  CHECK(ec_ratio_shortest == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("current-biased lumped model benchmark point") {
  const auto rep =
      current_biased_coupling(4.248381e-10, 2.56e-12, 4e-12, 505e9);
  CHECK(rep.ratio == doctest::Approx(0.200000).epsilon(1e-4));
  CHECK(rep.omega_p / two_pi / 1e9 == doctest::Approx(4.83).epsilon(0.01));
  CHECK(rep.omega_r == doctest::Approx(rep.omega_p).epsilon(0.01));
  CHECK(rep.anharmonicity < 0.0);
  CHECK(!rep.validity_warning);
  CHECK(rep.model == CouplingModel::current_biased);

  // A near-degenerate junction (E_J + E_L comparable to E_C) is flagged.
  const auto shallow = current_biased_coupling(1e-7, 1e-12, 1e-15, 1e8);
  CHECK(shallow.validity_warning);

  CHECK_THROWS_AS(current_biased_coupling(-1.0, 2.56e-12, 4e-12, 505e9),
                  ValidationError);
}

TEST_CASE("end-coupled ratio algebra") {
  CHECK(end_coupled_ratio(26.1447, 100.0, 1.0) ==
        doctest::Approx(0.150000).epsilon(1e-4));
  // sqrt(Z') and (E_J/E_C)^(1/4) scalings.
  const double base = end_coupled_ratio(20.0, 50.0, 1.0);
  CHECK(end_coupled_ratio(80.0, 50.0, 1.0) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK(end_coupled_ratio(20.0, 800.0, 1.0) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("end-coupled circuit reduction") {
  JunctionSpec j{JunctionKind::squid, 0.0, 1.9e10, 0.05, 5e-15};
  const auto spec = standard_line(5e-15, 6e-3 - 260e-6, j);
  const auto rep = end_coupled_model(spec, 0.0);
  CHECK(rep.model == CouplingModel::end_coupled);
  CHECK(rep.ratio > 0.0);
  CHECK(rep.ratio < 1.0);
  CHECK(!rep.validity_warning);  // l_q/2l = 0.0217
  CHECK(rep.note.find("C_J/C_q") != std::string::npos);
  CHECK(rep.anharmonicity < 0.0);

  // Moving the junction deep into the line breaks the reduction's premise.
  const auto deep = end_coupled_model(standard_line(5e-15, 3e-3, j), 0.0);
  CHECK(deep.validity_warning);
}

TEST_CASE("avoided crossing of the ultrastrong circuit") {
  JunctionSpec j{JunctionKind::squid, 0.0, 1.9e10, 0.05, 5e-15};
  const auto spec = standard_line(5e-15, 6e-3 - 260e-6, j);
  const auto result = avoided_crossing(spec, 0.25, 0.45, 21);
  CHECK(result.flux_at_minimum == doctest::Approx(0.34524).epsilon(0.01));
  CHECK(result.report.ratio == doctest::Approx(0.1089).epsilon(0.02));
  CHECK(result.report.g > 0.0);
  CHECK(result.report.anharmonicity < 0.0);
  CHECK(result.sweep.size() == 21);
  // The splitting is larger at both sweep edges than at the minimum.
  const double gmin = 2.0 * result.report.g;
  CHECK(result.sweep.front().omega2 - result.sweep.front().omega1 > gmin);
  CHECK(result.sweep.back().omega2 - result.sweep.back().omega1 > gmin);

  // A flux window that misses the crossing has a monotone splitting.
  CHECK_THROWS_AS(avoided_crossing(spec, 0.02, 0.2, 9), NumericalError);
  CHECK_THROWS_AS(avoided_crossing(spec, 0.25, 0.45, 3), ValidationError);
}

TEST_CASE("spectrum input validation") {
  InlineTransmonModel m{0.25e9, 0.0, 12.5e9};
  CHECK_THROWS_AS(inline_transmon_spectrum(m, 30), ValidationError);
  CHECK_THROWS_AS(inline_transmon_spectrum(m, 200), ValidationError);
}
