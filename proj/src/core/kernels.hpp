#ifndef NELSON_KERNELS_HPP
#define NELSON_KERNELS_HPP

// Deterministic quadrature of the closed-form kernels: the pair potential W,
// the mean shift gamma, the classical minimizer, the per-mode field
// covariance, and the boundary energies of the Gibbs weight.

#include <atomic>
#include <complex>
#include <vector>

#include "core/model.hpp"

namespace nelson {

struct TimeGrid;

// Particle path on a TimeGrid.
struct ParticlePath {
  TimeGrid tg;
  std::vector<Vec3> q;  // one position per node
};

// W(q,t) = -1/4 int (|rho_hat|^2/|k|) e^{-|k||t|} cos(k.q) dk, reduced to the
// radial integral
//   W(r,tau) = -(pi/r) int_0^inf |rho_hat(k)|^2 e^{-k tau} sin(kr) dk
// (limit -pi int k |rho_hat|^2 e^{-k tau} dk at r = 0).
double pair_potential(const FormFactor& ff, double r, double tau,
                      double abs_tol = 1e-14);
inline double pair_potential(const FormFactor& ff, const Vec3& q, double t) {
  return pair_potential(ff, q.norm(), std::abs(t));
}

// Same kernel evaluated as a mode-grid sum; used where exact consistency with
// other mode-grid sums matters (factorization oracle).
double pair_potential_grid(const FormFactor& ff, const ModeGrid& grid, const Vec3& q,
                           double t);

// gamma_hat(k) = -rho_hat(k) h_hat(k) / k^2 (singular at k = 0).
double gamma_hat(const FormFactor& ff, const InfraredProfile& ir, double k);

// gamma(x) by radial quadrature of gamma_hat.
double gamma_position(const FormFactor& ff, const InfraredProfile& ir, double r);

// xi_min(x) = (Delta^-1 rho)(x) = -int e^{ik.x} rho_hat/k^2 dk by quadrature.
double classical_minimizer(const FormFactor& ff, double r);

// Closed form for the Gaussian default: -(e/(4 pi r)) erf(Lambda r).
double classical_minimizer_closed(const FormFactor& ff, double r);

// Per-mode stationary covariance kernel e^{-|k||dt|}/(2|k|).
double field_covariance(double k, double dtau);

// How the infinite-time tail weight of the boundary energy is computed.
//   ClosedForm:         (e^{-|k|(T-t)} + e^{-|k|(T+t)}) / |k|
//   DiscreteComplement: 2/|k| minus the trapezoid sum of e^{-|k||t-s|} over
//                       the interior grid; agrees with ClosedForm to O(dt^2)
//                       and makes the Gaussian factorization identity exact.
enum class BoundaryTail { ClosedForm, DiscreteComplement };

// Sum of both boundary exponents of the Gibbs weight, computed in Fourier
// form on the mode grid:
//   -sum_t dt sum_k w (|rho_hat|^2 h_hat / (2|k|)) Re e^{ik.q_t} * tail(k,t).
double boundary_energy(const ParticlePath& path, double T, const FormFactor& ff,
                       const InfraredProfile& ir, const ModeGrid& grid,
                       BoundaryTail tail = BoundaryTail::ClosedForm);

// Interpolation table of W over (r, tau) for the MCMC hot loop. W scales
// exactly as e^2 Lambda^2 What(Lambda r, Lambda tau), so the table is stored
// once in scaled units. Bicubic (Catmull-Rom) interpolation on asinh-spaced
// axes; direct quadrature fallback outside the table range.
class KernelCache {
 public:
  KernelCache(double r_max = 48.0, double tau_max = 384.0, int nr = 512,
              int ntau = 512);

  double w(const FormFactor& ff, double r, double tau) const;
  std::uint64_t fallback_count() const { return fallbacks_.load(); }

  // Scaled-unit table bounds (e = Lambda = 1).
  double r_max() const { return r_max_; }
  double tau_max() const { return tau_max_; }

 private:
  double lookup_scaled(double r, double tau) const;

  double r_max_, tau_max_;
  int nr_, ntau_;
  double hr_, htau_;  // grid step in asinh coordinates
  std::vector<double> table_;  // row-major [ir][itau]
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

}  // namespace nelson

#endif
