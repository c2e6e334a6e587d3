#pragma once

#include <numbers>

namespace kerrline::constants {

// CODATA 2018 exact/recommended values (SI).
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck            = 6.62607015e-34;   // J s
inline constexpr double hbar              = planck / (2.0 * std::numbers::pi);
inline constexpr double flux_quantum      = planck / (2.0 * elementary_charge);  // Wb
inline constexpr double reduced_flux_quantum =
    flux_quantum / (2.0 * std::numbers::pi);
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double speed_of_light      = 299792458.0;       // m/s
inline constexpr double vacuum_impedance =
    1.0 / (vacuum_permittivity * speed_of_light);                 // ~376.73 Ohm
inline constexpr double klitzing_resistance =
    planck / (elementary_charge * elementary_charge);             // ~25.8 kOhm
inline constexpr double fine_structure =
    vacuum_impedance / (2.0 * klitzing_resistance);               // ~1/137

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Josephson inductance of a junction with energy ej_hz (E/h, Hz).
inline double josephson_inductance(double ej_hz) {
  return reduced_flux_quantum * reduced_flux_quantum / (planck * ej_hz);
}

}  // namespace kerrline::constants
