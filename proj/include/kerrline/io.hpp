#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrline/constants.hpp"
#include "kerrline/dynamics.hpp"
#include "kerrline/errors.hpp"
#include "kerrline/modes.hpp"

namespace kerrline::io {

/// Deterministic float formatting shared by every artifact writer.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Hash of the physical-constants table, recorded in manifests so that a
/// constants change invalidates comparisons between artifact sets.
inline std::string constants_hash() {
  std::string blob;
  for (double v : {constants::elementary_charge, constants::planck,
                   constants::hbar, constants::flux_quantum,
                   constants::vacuum_permittivity, constants::speed_of_light,
                   constants::vacuum_impedance, constants::fine_structure})
    blob += num(v) + ";";
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(blob)));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ValidationError("cannot write file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << num(values[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline nlohmann::ordered_json basis_to_json(const ModeBasis& basis) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& m : basis.modes) {
    arr.push_back({{"m", m.index},
                   {"k_per_m", m.k},
                   {"omega_rad_s", m.omega},
                   {"A", m.amplitude},
                   {"B", m.relative_amplitude},
                   {"phi_i", m.phi_in},
                   {"phi_o", m.phi_out},
                   {"delta_u", m.delta_u}});
  }
  return arr;
}

/// Envelope table u_1..u_M on a uniform x grid.
inline void write_envelopes(const ModeBasis& basis, int resolution,
                            const std::string& path) {
  std::vector<std::string> header{"x_m"};
  for (const auto& m : basis.modes)
    header.push_back("u_" + std::to_string(m.index));
  CsvWriter csv(path, header);
  const double ell = basis.circuit.half_length_m;
  for (int i = 0; i < resolution; ++i) {
    const double x = -ell + 2.0 * ell * i / (resolution - 1);
    std::vector<double> row{x};
    for (const auto& m : basis.modes) row.push_back(basis.mode_value(m, x));
    csv.row(row);
  }
}

inline void write_trajectory(const Trajectory& traj, const std::string& path) {
  CsvWriter csv(path, {"t_ns", "n_mean", "p1", "purity"});
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    csv.row({traj.t[i] * 1e9, traj.n_mean[i], traj.p1[i], traj.purity[i]});
}

inline void write_wigner(const WignerGrid& grid, const std::string& path) {
  CsvWriter csv(path, {"x", "p", "w"});
  for (std::size_t i = 0; i < grid.x.size(); ++i)
    for (std::size_t j = 0; j < grid.p.size(); ++j)
      csv.row({grid.x[i], grid.p[j], grid.w[i][j]});
}

inline void write_json(const nlohmann::ordered_json& doc,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << doc.dump(2) << "\n";
}

/// Manifest skeleton shared by all subcommands: version, config identity,
/// constants hash; the caller adds resolved parameters and results. No
/// timestamps anywhere, so artifact sets are byte-stable.
inline nlohmann::ordered_json manifest(const std::string& subcommand,
                                       const std::string& config_path,
                                       const std::string& config_text) {
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(config_text)));
  nlohmann::ordered_json doc;
  doc["tool"] = "kerrline";
  doc["version"] = "1.0.0";
  doc["subcommand"] = subcommand;
  doc["config"] = config_path;
  doc["config_hash"] = hash;
  doc["constants_hash"] = constants_hash();
  doc["parameters"] = nlohmann::ordered_json::object();
  doc["results"] = nlohmann::ordered_json::object();
  return doc;
}

}  // namespace kerrline::io
