#ifndef NELSON_FOCK_HPP
#define NELSON_FOCK_HPP

// Occupation-basis diagonalization of the renormalized Hamiltonian at finite
// mode truncation: +-k pairs are combined into real cosine/sine modes so the
// matrix is real symmetric; the counterterm is the h-weighted subtraction
// integral evaluated on the same mode grid.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "core/model.hpp"

namespace nelson {

enum class ParticleDof { Static, Grid1D, RadialGrid };

struct FockBasis {
  ModeGrid grid;
  int n_max = 0;
  ParticleDof dof = ParticleDof::Static;
  Vec3 q0 = Vec3::Zero();   // Static
  int n_sites = 1;          // Grid1D / RadialGrid particle dimension
  double spacing = 0.0;     // Grid1D
  double R_max = 0.0;       // RadialGrid

  // derived layout
  int n_modes = 0;                       // real modes (cos and sin per pair)
  std::vector<double> omega;             // per real mode
  std::vector<double> mode_weight;       // quadrature weight of one grid mode
  std::vector<double> mode_k;            // |k| per real mode
  std::vector<Vec3> mode_kvec;           // representative wavevector
  std::vector<bool> mode_is_sin;
  std::vector<std::vector<int>> occ;     // occupation multi-indices, ordered
  std::map<std::vector<int>, int> occ_index;

  long size() const { return static_cast<long>(occ.size()) * n_sites; }
  int state(int o, int p) const { return o * n_sites + p; }
  Vec3 site(int p) const;                // particle position of site p
  int total_occupancy(int o) const;

  static FockBasis make_static(const ModeGrid& grid, int n_max, const Vec3& q);
  static FockBasis make_grid1d(const ModeGrid& grid, int n_max, int n_sites,
                               double spacing);
  static FockBasis make_radial(const ModeGrid& grid, int n_max, int n_r,
                               double R_max);
};

struct SparseHamiltonian {
  long dim = 0;
  Eigen::SparseMatrix<double> mat;
  bool symmetric = true;
};

// H = H_p + sum omega a*a + sum lambda_m(q)(a_m + a*_m) + c0(q), with
// lambda_cos = sqrt(w/omega) rho (cos(k q) - h), lambda_sin = -sqrt(w/omega)
// rho sin(k q), and counterterm c0(q) = -sum w (rho^2/k^2) h (cos(k q) - h).
// RadialGrid uses the s-wave projection cos -> j0(kr), sin -> 0.
SparseHamiltonian build_hamiltonian(const FockBasis& basis, const FormFactor& ff,
                                    const InfraredProfile& ir,
                                    const ConfiningPotential* V = nullptr);

// Matrix-free application of the same operator (verified against the sparse
// assembly; intended for dimensions where storage is the bottleneck).
Eigen::VectorXd apply_hamiltonian(const FockBasis& basis, const FormFactor& ff,
                                  const InfraredProfile& ir,
                                  const ConfiningPotential* V,
                                  const Eigen::VectorXd& x);

struct SpectralResult {
  double E0 = 0.0;
  double gap = 0.0;
  Eigen::VectorXd ground_vector;  // sign-fixed: first significant entry > 0
  double mean_boson_number = 0.0;
  double vacuum_overlap = 0.0;    // |<vac x particle ground, Psi0>|^2
  double residual = 0.0;
};

// Small problems are solved densely; larger ones by Lanczos with full
// reorthogonalization and a deterministic start vector.
SpectralResult ground_state(const SparseHamiltonian& H, const FockBasis& basis,
                            const ConfiningPotential* V = nullptr,
                            double tol = 1e-10);

struct VanHove {
  double E0 = 0.0;
  double N = 0.0;
};

// Frozen-particle displaced-oscillator closed form:
// E0 = c0(q) - sum_j w_j rho^2 |e^{ikq} - h|^2 / (2 k^2),
// N  =         sum_j w_j rho^2 |e^{ikq} - h|^2 / (2 k^3).
VanHove van_hove_oracle(const ModeGrid& grid, const FormFactor& ff,
                        const InfraredProfile& ir, const Vec3& q);

struct IrScanRow {
  double k_min = 0.0;
  int M = 0, n_max = 0;
  double E0 = 0.0, gap = 0.0, N_mean = 0.0, vacuum_overlap = 0.0, residual = 0.0;
  bool ok = false;
  std::string error;
};

struct BasisTemplate {
  ParticleDof dof = ParticleDof::Static;
  int n_shells = 8, n_dirs = 2, n_max = 3;
  double k_max = 8.0;
  Vec3 q0 = Vec3::Zero();
  int n_sites = 1;
  double spacing = 0.0, R_max = 0.0;
};

std::vector<IrScanRow> ir_scan(const std::vector<double>& k_mins,
                               const BasisTemplate& tmpl, const FormFactor& ff,
                               const InfraredProfile& ir,
                               const ConfiningPotential* V = nullptr);

enum class Observable { Identity, ParticleR2, FieldQuadrature };

// Observable conjugated into the working (shifted) representation. The field
// quadrature of pair `mode_pair` is (a + a*)/(2 sqrt(omega w)) + gamma_hat(k),
// the c-number shift restoring the physical field coordinate.
SparseHamiltonian transform_observable(const FockBasis& basis, const FormFactor& ff,
                                       const InfraredProfile& ir, Observable obs,
                                       int mode_pair = 0);

}  // namespace nelson

#endif
