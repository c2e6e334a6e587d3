#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kerrline/modes.hpp"

using namespace kerrline;

namespace {

CircuitSpec uniform_line(double cj, double xj, double ej, double ci = 1e-14,
                         double co = 1e-14) {
  CircuitSpec s;
  s.half_length_m = 6e-3;
  s.junction_position_m = xj;
  s.left.c_per_m = s.right.c_per_m = 1.6668363601e-10;
  s.left.l_per_m = s.right.l_per_m = 4.1670909004e-07;
  s.ports.c_in_f = ci;
  s.ports.c_out_f = co;
  s.ports.z_ext_ohm = 50.0;
  s.junction.kind = JunctionKind::single;
  s.junction.ej_hz = ej;
  s.junction.cj_f = cj;
  return s;
}

/// Simpson quadrature of the capacitive inner product, splitting at the kink.
/// Independent check of the closed-form evaluation.
double quadrature_inner_product(int m, int n, const ModeBasis& basis,
                                int panels = 50000) {
  const auto& spec = basis.circuit;
  const auto& um = basis.modes.at(m - 1);
  const auto& un = basis.modes.at(n - 1);
  const double ell = spec.half_length_m;
  auto simpson = [&](double a, double b, double c_per_m) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i <= panels; ++i) {
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      // Evaluate strictly inside the half-open segment to stay on one branch.
      const double x = a + i * h;
      acc += w * basis.mode_value(um, x) * basis.mode_value(un, x);
    }
    return c_per_m * acc * h / 3.0;
  };
  const double xj = spec.junction_position_m;
  double total = simpson(-ell, std::nextafter(xj, -ell), spec.left.c_per_m) +
                 simpson(std::nextafter(xj, ell), ell, spec.right.c_per_m);
  total += spec.ports.c_in_f * basis.mode_value(um, -ell) *
           basis.mode_value(un, -ell);
  total += spec.ports.c_out_f * basis.mode_value(um, ell) *
           basis.mode_value(un, ell);
  total += basis.cj_f * um.delta_u * un.delta_u;
  return total;
}

}  // namespace

TEST_CASE("bare uniform resonator hits the calibrated fundamental") {
  auto spec = uniform_line(0.0, 0.0, 1e11);
  const auto bare = find_modes_bare(spec, 3);
  CHECK(bare.modes[0].omega / constants::two_pi ==
        doctest::Approx(4.95e9).epsilon(1e-3));
  // Harmonics of the weakly loaded line are nearly equally spaced.
  CHECK(bare.modes[1].omega / bare.modes[0].omega ==
        doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("velocity calibration closed form") {
  const double v =
      calibrate_velocity(4.95e9, 6e-3, 50.0, 1e-14, 1e-14);
  CHECK(v == doctest::Approx(1.1998778331e8).epsilon(1e-9));
  auto spec = uniform_line(0.0, 0.0, 1e11);
  spec.left.c_per_m = spec.right.c_per_m = 1.0 / (v * 50.0);
  spec.left.l_per_m = spec.right.l_per_m = 50.0 / v;
  const auto bare = find_modes_bare(spec, 1);
  CHECK(bare.modes[0].omega / constants::two_pi ==
        doctest::Approx(4.95e9).epsilon(1e-10));
}

TEST_CASE("open-ended limit recovers k = m pi / 2l") {
  auto spec = uniform_line(0.0, 0.0, 1e11);
  spec.ports.c_in_f = spec.ports.c_out_f = 1e-22;  // C -> 0: phi -> pi/2
  const auto bare = find_modes_bare(spec, 3);
  for (int m = 1; m <= 3; ++m)
    CHECK(bare.modes[m - 1].k ==
          doctest::Approx(m * std::numbers::pi / 1.2e-2).epsilon(1e-6));
}

TEST_CASE("centered junction couples only odd modes") {
  const auto basis = find_modes(uniform_line(2e-15, 0.0, 6.36e11), 0.0, 4);
  CHECK(std::abs(basis.modes[0].delta_u) > 0.01);
  CHECK(basis.modes[1].delta_u == 0.0);
  CHECK(std::abs(basis.modes[2].delta_u) > 0.01);
  CHECK(basis.modes[3].delta_u == 0.0);
  // Junction-blind modes sit at current nodes of the bare line.
  const auto bare = find_modes_bare(uniform_line(0.0, 0.0, 1.0), 4);
  CHECK(basis.modes[1].omega ==
        doctest::Approx(bare.modes[1].omega).epsilon(1e-6));
}

TEST_CASE("closed-form inner products match quadrature") {
  const auto basis = find_modes(uniform_line(5e-15, 1.7e-3, 3e11), 0.0, 3);
  for (int m = 1; m <= 3; ++m) {
    for (int n = m; n <= 3; ++n) {
      const double closed = inner_product(m, n, basis);
      const double quad = quadrature_inner_product(m, n, basis);
      CHECK(std::abs(closed - quad) < 1e-8 * basis.total_capacitance);
    }
  }
}

TEST_CASE("orthonormality and lumped properties on the benchmark circuit") {
  const auto basis = find_modes(uniform_line(2e-15, 0.0, 6.36e11), 0.0, 4);
  const double c_sigma = basis.total_capacitance;
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      const double ip = inner_product(m, n, basis) / c_sigma;
      CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-8);
      const double lm = 1.0 / (c_sigma * basis.modes[m - 1].omega *
                               basis.modes[m - 1].omega);
      const double dip = derivative_inner_product(m, n, basis) * lm;
      CHECK(std::abs(dip - (m == n ? 1.0 : 0.0)) < 1e-6);
    }
  }
  const auto props = mode_properties(basis);  // sum rules asserted inside
  for (const auto& p : props) {
    CHECK(p.omega > 0.0);
    if (p.junction_coupled) {
      CHECK(*p.eta_l > 0.0);
      CHECK(*p.eta_l < 1.0);
    }
  }
}

TEST_CASE("randomized circuits keep orthonormality and sum rules") {
  std::mt19937 rng(20240817);
  auto logu = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  std::uniform_real_distribution<double> uni(-0.85, 0.85);

  for (int trial = 0; trial < 50; ++trial) {
    CircuitSpec s;
    s.half_length_m = logu(2e-3, 1.2e-2);
    s.junction_position_m = uni(rng) * s.half_length_m;
    s.left.c_per_m = logu(5e-11, 5e-10);
    s.left.l_per_m = logu(1e-7, 1e-6);
    s.right.c_per_m = logu(5e-11, 5e-10);
    s.right.l_per_m = logu(1e-7, 1e-6);
    s.ports.c_in_f = logu(1e-15, 5e-14);
    s.ports.c_out_f = logu(1e-15, 5e-14);
    s.ports.z_ext_ohm = 50.0;
    s.junction.kind = JunctionKind::single;
    s.junction.ej_hz = logu(1e10, 1e14);
    s.junction.cj_f = logu(5e-16, 1e-14);

    CAPTURE(trial);
    const auto basis = find_modes(s, 0.0, 4);
    const double c_sigma = basis.total_capacitance;
    for (int m = 1; m <= 4; ++m) {
      for (int n = 1; n <= 4; ++n) {
        const double ip = inner_product(m, n, basis) / c_sigma;
        CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-8);
        const double lm = 1.0 / (c_sigma * basis.modes[m - 1].omega *
                                 basis.modes[m - 1].omega);
        const double dip = derivative_inner_product(m, n, basis) * lm;
        CHECK(std::abs(dip - (m == n ? 1.0 : 0.0)) < 1e-6);
      }
    }
    CHECK_NOTHROW(mode_properties(basis));
  }
}

TEST_CASE("invalid requests are rejected") {
  CHECK_THROWS_AS(find_modes(uniform_line(0.0, 0.0, 1e11), 0.0, 0),
                  ValidationError);
  // Degenerate scan window: asking for far more modes than the window holds.
  auto spec = uniform_line(0.0, 0.0, 1e11);
  CHECK_THROWS_AS(find_modes(spec, 0.0, 50, 10), NumericalError);
}
