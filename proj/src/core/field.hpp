#ifndef NELSON_FIELD_HPP
#define NELSON_FIELD_HPP

// Finite-mode Gaussian field calculus: stationary Gauss-Markov sampling of the
// mode amplitudes, the conditional (dressing) mean given a particle path, and
// closed-form Gaussian exponential moments that power the partition-function
// factorization oracle.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core/kernels.hpp"
#include "core/model.hpp"

namespace nelson {

using Complex = std::complex<double>;

// Per-mode stationary law. Amplitudes are stored in the weight-normalized
// convention a(k) = sqrt(w) xi_hat(k), so the stationary variance is 1/(2|k|)
// for every mode and quadrature weights enter only through functional
// coefficients.
struct GaussianLaw {
  ModeGrid grid;
  std::vector<Complex> mean;
  std::vector<double> variance;    // 1/(2|k|)
  std::vector<double> relaxation;  // |k|

  static GaussianLaw shifted(const ModeGrid& grid, const FormFactor& ff,
                             const InfraredProfile& ir);
  static GaussianLaw centred(const ModeGrid& grid);
};

struct FieldTrajectory {
  TimeGrid tg;
  // values[i][j]: amplitude of mode j at node i; values[i][antipode(j)] is its
  // exact conjugate.
  std::vector<std::vector<Complex>> values;
};

// Stationary OU recursion per independent mode pair: autocorrelation
// e^{-|k| dt}, stationary variance law.variance, mean law.mean; the k <-> -k
// conjugation constraint holds by mirroring.
FieldTrajectory sample_field(const GaussianLaw& law, const TimeGrid& tg,
                             std::uint64_t seed);

// Coordinate shift realizing the unitary map between the centred and shifted
// pictures: adds sign * law.mean to every node.
void apply_shift(FieldTrajectory& traj, const GaussianLaw& law, double sign = 1.0);

struct DressingFunction {
  std::vector<Complex> g_hat;  // physical per-mode values, g(-k) = g(k)*
  double t = 0.0, T = 0.0;
};

enum class DressingForm { A, B };

// Conditional mean of the field given the particle path over [-T, T]:
//   A: gamma_hat(k) - (rho/2k) int e^{-k|t-tau|} (e^{ik q_tau} - h_hat) dtau
//   B: -(rho/2k) int e^{-k|t-tau|} e^{ik q_tau} dtau
//      - (rho h_hat / 2k^2)(e^{-k(T-t)} + e^{-k(T+t)})
// Both share the trapezoid discretization of the e^{ik q_tau} integral and use
// closed forms for the pure-exponential integrals, so A = B up to rounding.
DressingFunction conditional_mean(const ParticlePath& path, const ModeGrid& grid,
                                  const InfraredProfile& ir, const FormFactor& ff,
                                  double t, DressingForm form);

// log E[exp(l)] for the linear functional l = sum_{i,j} c_ij a_{t_i}(k_j):
// l(mean) + Var(l)/2 from the per-mode OU covariance. Coefficients must be
// conjugation-symmetric (real functional).
double log_gaussian_exp_functional(const std::vector<double>& times,
                                   const Eigen::MatrixXcd& coeffs,
                                   const GaussianLaw& law);
double gaussian_exp_functional(const std::vector<double>& times,
                               const Eigen::MatrixXcd& coeffs,
                               const GaussianLaw& law);

struct PartitionPair {
  double log_z = 0.0;     // field integral of the interaction, done exactly
  double log_zeta = 0.0;  // pair-potential action with boundary energies
  double z() const { return std::exp(log_z); }
  double zeta() const { return std::exp(log_zeta); }
  double log_ratio() const { return log_z - log_zeta; }
};

// Z and the W-action normalizer for one path at matched discretization; their
// ratio is the path-independent constant C_T.
PartitionPair finite_mode_partition(const ParticlePath& path, const ModeGrid& grid,
                                    const FormFactor& ff, const InfraredProfile& ir);

}  // namespace nelson

#endif
