#ifndef NELSON_PARTICLE_HPP
#define NELSON_PARTICLE_HPP

// The reference process: ground state psi_0 of -1/2 Delta + V, its drift
// grad log psi_0, the stationary measure nu0 = psi_0^2 dx, and sampled
// trajectories of the associated diffusion.

#include <cstdint>
#include <vector>

#include "core/kernels.hpp"
#include "core/model.hpp"

namespace nelson {

struct GroundStateSolution {
  std::vector<double> r;        // uniform radial grid on [0, R_max]
  std::vector<double> psi;      // psi_0(r), normalized 4pi int r^2 psi^2 dr = 1
  std::vector<double> u;        // u = r psi
  std::vector<double> log_slope;  // psi_0'(r)/psi_0(r) at nodes
  std::vector<double> cdf;      // radial CDF of nu0
  double Ep = 0.0;              // lowest eigenvalue
  double R_max = 0.0, dr = 0.0;
  double r_reliable = 0.0;  // last radius with a trustworthy drift table entry
  double residual = 0.0;        // discretization residual (4th-order stencil)
  ConfiningPotential V;

  double psi_at(double radius) const;
  double radial_density(double radius) const;  // 4 pi r^2 psi^2
  double drift_radial(double radius) const;    // psi'/psi, WKB tail beyond grid
  Vec3 drift(const Vec3& x) const;
  double cdf_at(double radius) const;
  double cdf_inverse(double uq) const;
};

// s-wave reduction u = r psi, second-order finite differences, smallest
// eigenpair by inverse iteration, Richardson-extrapolated eigenvalue.
GroundStateSolution solve_ground_state(const ConfiningPotential& V, double R_max,
                                       int n_grid);

// i.i.d. draws from nu0 (inverse CDF radius x uniform direction).
std::vector<Vec3> sample_stationary(const GroundStateSolution& gs, std::uint64_t seed,
                                    int n);

// Euler-Maruyama integration of dq = drift dt + dB over the grid, stationary
// start. noise_scale exists for the zero-noise fixed-point check.
ParticlePath sample_path(const GroundStateSolution& gs, const TimeGrid& tg,
                         std::uint64_t seed, double noise_scale = 1.0);

// c3 = int (|q| + b) dnu0.
double stationary_moment(const GroundStateSolution& gs, double b);

}  // namespace nelson

#endif
