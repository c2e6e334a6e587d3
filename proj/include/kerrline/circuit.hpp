#pragma once

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kerrline/constants.hpp"
#include "kerrline/errors.hpp"

namespace kerrline {

/// One side of the transmission line, described by its per-length constants.
struct LineSegmentSpec {
  double c_per_m = 0.0;  // F/m
  double l_per_m = 0.0;  // H/m

  double impedance() const { return std::sqrt(l_per_m / c_per_m); }  // Ohm
  double velocity() const { return 1.0 / std::sqrt(l_per_m * c_per_m); }  // m/s
};

struct PortSpec {
  double c_in_f = 0.0;       // F
  double c_out_f = 0.0;      // F
  double z_ext_ohm = 50.0;   // Ohm, used only for decay-rate estimates
};

enum class JunctionKind { single, squid };

struct JunctionSpec {
  JunctionKind kind = JunctionKind::single;
  double ej_hz = 0.0;       // E_J/h for a single junction (Hz)
  double ejsigma_hz = 0.0;  // E_JSigma/h for a SQUID (Hz)
  double asymmetry = 0.0;   // d in [0, 1], SQUID only
  double cj_f = 0.0;        // junction capacitance (F)
};

/// Full physical description of the resonator + junction circuit.
struct CircuitSpec {
  double half_length_m = 0.0;  // ell
  double junction_position_m = 0.0;  // x_J in (-ell, ell)
  LineSegmentSpec left;
  LineSegmentSpec right;
  PortSpec ports;
  JunctionSpec junction;

  /// Total capacitance C_Sigma = integral C0 dx + C_i + C_o + C_J.
  double total_capacitance() const {
    const double ell = half_length_m;
    const double xj = junction_position_m;
    return left.c_per_m * (xj + ell) + right.c_per_m * (ell - xj) +
           ports.c_in_f + ports.c_out_f + junction.cj_f;
  }
};

/// Flux-dependent effective Josephson energy of the junction, E_J/h in Hz.
/// `flux` is the dc flux bias in units of Phi_0. For a single junction the
/// flux is ignored. The SQUID gauge phase delta_0 = arctan(d tan(pi Phi_x/Phi_0))
/// is dropped; only |E_J| enters downstream.
inline double effective_josephson_energy(const JunctionSpec& junction,
                                         double flux) {
  if (junction.kind == JunctionKind::single) return junction.ej_hz;
  const double phase = std::numbers::pi * flux;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  const double d = junction.asymmetry;
  // Equivalent to |cos| sqrt(1 + d^2 tan^2), continuous through Phi_0/2.
  return junction.ejsigma_hz * std::sqrt(c * c + d * d * s * s);
}

namespace detail {

inline double require_number(const nlohmann::json& obj, const std::string& path,
                             const std::string& key) {
  if (!obj.contains(key))
    throw ValidationError("missing key: " + path + "." + key);
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ValidationError("expected a number at " + path + "." + key);
  return v.get<double>();
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::string& path,
                                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ValidationError("unknown key: " + path + "." + item.key());
  }
}

inline void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ValidationError(path + " must be > 0");
}

inline void require_nonnegative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ValidationError(path + " must be >= 0");
}

inline LineSegmentSpec parse_segment(const nlohmann::json& obj,
                                     const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path + " must be an object");
  reject_unknown_keys(obj, path, {"c_per_m", "l_per_m"});
  LineSegmentSpec seg;
  seg.c_per_m = require_number(obj, path, "c_per_m");
  seg.l_per_m = require_number(obj, path, "l_per_m");
  require_positive(seg.c_per_m, path + ".c_per_m");
  require_positive(seg.l_per_m, path + ".l_per_m");
  return seg;
}

}  // namespace detail

/// Parse and validate a circuit config document. All numeric values are SI
/// floats; unknown keys are rejected so that typos in physical parameters
/// fail loudly.
inline CircuitSpec load_and_validate_spec(const nlohmann::json& doc) {
  using detail::require_number;
  if (!doc.is_object()) throw ValidationError("config root must be an object");
  detail::reject_unknown_keys(doc, "$", {"resonator", "ports", "junction"});
  for (const char* key : {"resonator", "ports", "junction"}) {
    if (!doc.contains(key))
      throw ValidationError(std::string("missing key: $.") + key);
  }

  CircuitSpec spec;

  const auto& res = doc.at("resonator");
  detail::reject_unknown_keys(res, "resonator",
                              {"half_length_m", "left", "right"});
  spec.half_length_m = require_number(res, "resonator", "half_length_m");
  detail::require_positive(spec.half_length_m, "resonator.half_length_m");
  if (!res.contains("left") || !res.contains("right"))
    throw ValidationError("resonator requires left and right segments");
  spec.left = detail::parse_segment(res.at("left"), "resonator.left");
  spec.right = detail::parse_segment(res.at("right"), "resonator.right");

  const auto& ports = doc.at("ports");
  detail::reject_unknown_keys(ports, "ports", {"c_in_f", "c_out_f", "z_ext_ohm"});
  spec.ports.c_in_f = require_number(ports, "ports", "c_in_f");
  spec.ports.c_out_f = require_number(ports, "ports", "c_out_f");
  spec.ports.z_ext_ohm = require_number(ports, "ports", "z_ext_ohm");
  detail::require_nonnegative(spec.ports.c_in_f, "ports.c_in_f");
  detail::require_nonnegative(spec.ports.c_out_f, "ports.c_out_f");
  detail::require_positive(spec.ports.z_ext_ohm, "ports.z_ext_ohm");

  const auto& junction = doc.at("junction");
  if (!junction.contains("type") || !junction.at("type").is_string())
    throw ValidationError("junction.type must be \"single\" or \"squid\"");
  const std::string type = junction.at("type").get<std::string>();
  if (type == "single") {
    detail::reject_unknown_keys(junction, "junction",
                                {"type", "ej_hz", "cj_f", "position_m"});
    spec.junction.kind = JunctionKind::single;
    spec.junction.ej_hz = require_number(junction, "junction", "ej_hz");
    detail::require_positive(spec.junction.ej_hz, "junction.ej_hz");
  } else if (type == "squid") {
    detail::reject_unknown_keys(junction, "junction",
                                {"type", "ejsigma_hz", "d", "cj_f", "position_m"});
    spec.junction.kind = JunctionKind::squid;
    spec.junction.ejsigma_hz = require_number(junction, "junction", "ejsigma_hz");
    spec.junction.asymmetry = require_number(junction, "junction", "d");
    detail::require_positive(spec.junction.ejsigma_hz, "junction.ejsigma_hz");
    if (spec.junction.asymmetry < 0.0 || spec.junction.asymmetry > 1.0)
      throw ValidationError("junction.d (asymmetry) must be in [0, 1]");
  } else {
    throw ValidationError("junction.type must be \"single\" or \"squid\"");
  }
  spec.junction.cj_f = require_number(junction, "junction", "cj_f");
  detail::require_nonnegative(spec.junction.cj_f, "junction.cj_f");
  spec.junction_position_m = require_number(junction, "junction", "position_m");
  if (!(spec.junction_position_m > -spec.half_length_m &&
        spec.junction_position_m < spec.half_length_m))
    throw ValidationError(
        "junction.position_m (junction_position) must lie inside the "
        "resonator, (-half_length, half_length)");

  return spec;
}

inline CircuitSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config parse error in " + path + ": " + e.what());
  }
  return load_and_validate_spec(doc);
}

}  // namespace kerrline
