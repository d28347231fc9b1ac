#ifndef NELSON_CONFIG_HPP
#define NELSON_CONFIG_HPP

// Flat INI-style experiment configuration: sections [model], [grid],
// [sampler], [fock]; every key has an explicit default below and unknown keys
// are hard errors. One key table drives parsing, serialization, and dotted
// overrides, so serialize() -> parse() round-trips structurally.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace nelson {

struct Config {
  // [model]
  double e = 0.3;
  double lambda = 1.0;
  std::string ir = "unit";           // zero | unit | bump
  double kappa = 1.0;
  std::string potential = "power";   // power | harmonic
  double pot_C = 1.0;
  double pot_s = 2.0;

  // [grid]
  double k_min = 0.05, k_max = 8.0;
  int n_shells = 8, n_dirs = 6;
  double T = 4.0, dt = 0.25;
  double R_max = 6.0;
  int n_grid = 3000;
  std::vector<double> T_list = {4.0, 8.0};

  // [sampler]
  int n_sweeps = 2000, n_burn = 500, block_len = 8, n_chains = 2, thin = 10;
  std::uint64_t seed = 1;
  std::vector<double> k_probes = {0.1, 0.2, 0.4};
  std::vector<std::pair<double, double>> st_probes = {{-1.0, 1.0}};

  // [fock]
  int fock_n_max = 3, fock_n_shells = 6, fock_n_dirs = 2;
  double fock_k_max = 6.0;
  std::string fock_dof = "static";   // static | grid1d | radial
  double q0_x = 0.0, q0_y = 0.0, q0_z = 0.5;
  int fock_n_sites = 9;
  double fock_spacing = 0.5, fock_R_max = 6.0;
  std::vector<double> fock_k_mins = {0.1, 0.01};

  IrVariant ir_variant() const;
  ConfiningPotential make_potential() const;
  void validate() const;

  std::string serialize() const;           // canonical INI text
  std::uint64_t hash() const;              // FNV-1a 64 of serialize()
  void set(const std::string& dotted_key, const std::string& value);

  static Config parse(const std::string& text);
  static Config load(const std::string& path);
};

}  // namespace nelson

#endif
