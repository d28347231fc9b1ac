#include "core/fock.hpp"

#include "core/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace nelson {

namespace {

void enumerate_occ(int n_modes, int budget, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n_modes) {
    out.push_back(cur);
    return;
  }
  for (int n = 0; n <= budget; ++n) {
    cur.push_back(n);
    enumerate_occ(n_modes, budget - n, cur, out);
    cur.pop_back();
  }
}

void finish_basis(FockBasis& b) {
  const int n_grid = b.grid.size();
  if (n_grid % 2 != 0)
    throw ValidationError("fock basis: mode grid must pair antipodally");
  b.n_modes = n_grid;  // one cos and one sin real mode per +-k pair
  const int n_pairs = n_grid / 2;
  b.omega.resize(b.n_modes);
  b.mode_weight.resize(b.n_modes);
  b.mode_k.resize(b.n_modes);
  b.mode_kvec.resize(b.n_modes);
  b.mode_is_sin.resize(b.n_modes);
  int m = 0;
  for (int j = 0; j < n_grid; ++j) {
    if (b.grid.antipode[j] < j) continue;  // representative of the pair
    for (int s = 0; s < 2; ++s, ++m) {
      b.omega[m] = b.grid.modes[j].k.norm();
      b.mode_weight[m] = b.grid.modes[j].w;
      b.mode_k[m] = b.omega[m];
      b.mode_kvec[m] = b.grid.modes[j].k;
      b.mode_is_sin[m] = (s == 1);
    }
  }
  (void)n_pairs;

  std::vector<int> cur;
  enumerate_occ(b.n_modes, b.n_max, cur, b.occ);
  for (int o = 0; o < static_cast<int>(b.occ.size()); ++o) b.occ_index[b.occ[o]] = o;
  if (b.size() > 2000000)
    throw ValidationError("fock basis: dimension " + std::to_string(b.size()) +
                          " exceeds the memory budget");
}

}  // namespace

Vec3 FockBasis::site(int p) const {
  switch (dof) {
    case ParticleDof::Static: return q0;
    case ParticleDof::Grid1D:
      return Vec3(0, 0, (p - 0.5 * (n_sites - 1)) * spacing);
    case ParticleDof::RadialGrid: {
      double dr = R_max / (n_sites + 1);
      return Vec3(0, 0, (p + 1) * dr);
    }
  }
  return Vec3::Zero();
}

int FockBasis::total_occupancy(int o) const {
  int n = 0;
  for (int v : occ[o]) n += v;
  return n;
}

FockBasis FockBasis::make_static(const ModeGrid& grid, int n_max, const Vec3& q) {
  FockBasis b;
  b.grid = grid;
  b.n_max = n_max;
  b.dof = ParticleDof::Static;
  b.q0 = q;
  b.n_sites = 1;
  finish_basis(b);
  return b;
}

FockBasis FockBasis::make_grid1d(const ModeGrid& grid, int n_max, int n_sites,
                                 double spacing) {
  if (n_sites < 2 || !(spacing > 0.0))
    throw ValidationError("fock basis: grid1d needs n_sites >= 2, spacing > 0");
  FockBasis b;
  b.grid = grid;
  b.n_max = n_max;
  b.dof = ParticleDof::Grid1D;
  b.n_sites = n_sites;
  b.spacing = spacing;
  finish_basis(b);
  return b;
}

FockBasis FockBasis::make_radial(const ModeGrid& grid, int n_max, int n_r,
                                 double R_max) {
  if (n_r < 2 || !(R_max > 0.0))
    throw ValidationError("fock basis: radial grid needs n_r >= 2, R_max > 0");
  FockBasis b;
  b.grid = grid;
  b.n_max = n_max;
  b.dof = ParticleDof::RadialGrid;
  b.n_sites = n_r;
  b.R_max = R_max;
  finish_basis(b);
  return b;
}

namespace {

double sinc0(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

struct AssemblyData {
  std::vector<std::vector<double>> lambda;  // [mode][site]
  std::vector<double> c0;                   // counterterm per site
  std::vector<double> hp_diag;              // particle diagonal (kinetic + V)
  double hp_off = 0.0;                      // nearest-neighbour coupling
};

AssemblyData make_data(const FockBasis& b, const FormFactor& ff,
                       const InfraredProfile& ir, const ConfiningPotential* V) {
  AssemblyData d;
  const int np = b.n_sites;
  d.lambda.assign(b.n_modes, std::vector<double>(np, 0.0));
  d.c0.assign(np, 0.0);
  d.hp_diag.assign(np, 0.0);

  for (int m = 0; m < b.n_modes; ++m) {
    double k = b.mode_k[m];
    double rh = ff.rho_hat(k);
    double hh = ir.h_hat(k);
    double pre = std::sqrt(b.mode_weight[m] / b.omega[m]) * rh;
    for (int p = 0; p < np; ++p) {
      double cfac, sfac;
      if (b.dof == ParticleDof::RadialGrid) {
        cfac = sinc0(k * b.site(p).norm());
        sfac = 0.0;  // s-wave projection
      } else {
        double ph = b.mode_kvec[m].dot(b.site(p));
        cfac = std::cos(ph);
        sfac = std::sin(ph);
      }
      d.lambda[m][p] = b.mode_is_sin[m] ? -pre * sfac : pre * (cfac - hh);
      if (!b.mode_is_sin[m]) {
        // counterterm: both pair members contribute the same real part
        d.c0[p] -= 2.0 * b.mode_weight[m] * rh * rh / (k * k) * hh * (cfac - hh);
      }
    }
  }

  if (b.dof != ParticleDof::Static) {
    double h = b.dof == ParticleDof::Grid1D ? b.spacing : b.R_max / (b.n_sites + 1);
    d.hp_off = -0.5 / (h * h);
    for (int p = 0; p < np; ++p) {
      d.hp_diag[p] = 1.0 / (h * h);
      if (V) d.hp_diag[p] += (*V)(b.site(p).norm());
    }
  } else if (V) {
    d.hp_diag[0] = (*V)(b.q0.norm());
  }
  return d;
}

}  // namespace

SparseHamiltonian build_hamiltonian(const FockBasis& basis, const FormFactor& ff,
                                    const InfraredProfile& ir,
                                    const ConfiningPotential* V) {
  AssemblyData d = make_data(basis, ff, ir, V);
  const long dim = basis.size();
  const int np = basis.n_sites;
  const int no = static_cast<int>(basis.occ.size());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(dim * (basis.n_modes + 3));
  std::vector<int> tmp;
  for (int o = 0; o < no; ++o) {
    const auto& occ = basis.occ[o];
    double field = 0.0;
    for (int m = 0; m < basis.n_modes; ++m) field += occ[m] * basis.omega[m];
    for (int p = 0; p < np; ++p) {
      long row = basis.state(o, p);
      trip.emplace_back(row, row, field + d.c0[p] + d.hp_diag[p]);
      if (d.hp_off != 0.0 && p + 1 < np) {
        trip.emplace_back(row, basis.state(o, p + 1), d.hp_off);
        trip.emplace_back(basis.state(o, p + 1), row, d.hp_off);
      }
    }
    for (int m = 0; m < basis.n_modes; ++m) {
      if (occ[m] == 0) continue;
      tmp = occ;
      tmp[m]--;
      int o2 = basis.occ_index.at(tmp);
      double amp = std::sqrt(static_cast<double>(occ[m]));
      for (int p = 0; p < np; ++p) {
        double v = d.lambda[m][p] * amp;
        if (v == 0.0) continue;
        trip.emplace_back(basis.state(o, p), basis.state(o2, p), v);
        trip.emplace_back(basis.state(o2, p), basis.state(o, p), v);
      }
    }
  }

  SparseHamiltonian H;
  H.dim = dim;
  H.mat.resize(dim, dim);
  H.mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> diff = H.mat - Eigen::SparseMatrix<double>(H.mat.transpose());
  double asym = 0.0;
  for (int c = 0; c < diff.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, c); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  if (asym > 1e-12) throw std::runtime_error("build_hamiltonian: asymmetric assembly");
  return H;
}

Eigen::VectorXd apply_hamiltonian(const FockBasis& basis, const FormFactor& ff,
                                  const InfraredProfile& ir,
                                  const ConfiningPotential* V,
                                  const Eigen::VectorXd& x) {
  AssemblyData d = make_data(basis, ff, ir, V);
  const int np = basis.n_sites;
  const int no = static_cast<int>(basis.occ.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(basis.size());
  std::vector<int> tmp;
  for (int o = 0; o < no; ++o) {
    const auto& occ = basis.occ[o];
    double field = 0.0;
    for (int m = 0; m < basis.n_modes; ++m) field += occ[m] * basis.omega[m];
    for (int p = 0; p < np; ++p) {
      long row = basis.state(o, p);
      y[row] += (field + d.c0[p] + d.hp_diag[p]) * x[row];
      if (d.hp_off != 0.0) {
        if (p + 1 < np) y[row] += d.hp_off * x[basis.state(o, p + 1)];
        if (p > 0) y[row] += d.hp_off * x[basis.state(o, p - 1)];
      }
    }
    for (int m = 0; m < basis.n_modes; ++m) {
      if (occ[m] == 0) continue;
      tmp = occ;
      tmp[m]--;
      int o2 = basis.occ_index.at(tmp);
      double amp = std::sqrt(static_cast<double>(occ[m]));
      for (int p = 0; p < np; ++p) {
        double v = d.lambda[m][p] * amp;
        y[basis.state(o, p)] += v * x[basis.state(o2, p)];
        y[basis.state(o2, p)] += v * x[basis.state(o, p)];
      }
    }
  }
  return y;
}

namespace {

// Smallest two Ritz pairs by Lanczos with full reorthogonalization.
void lanczos(const Eigen::SparseMatrix<double>& A, double tol, double& e0, double& e1,
             Eigen::VectorXd& ground) {
  const long n = A.rows();
  if (n == 1) {
    e0 = e1 = A.coeff(0, 0);
    ground = Eigen::VectorXd::Ones(1);
    return;
  }
  const int m_max = static_cast<int>(std::min<long>(n, 400));
  std::vector<Eigen::VectorXd> vs;
  std::vector<double> alpha, beta;
  std::vector<double> history;

  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(2.3 * i);
  v.normalize();
  vs.push_back(v);

  Eigen::VectorXd w;
  for (int j = 0; j < m_max; ++j) {
    w = A * vs[j];
    if (j > 0) w -= beta[j - 1] * vs[j - 1];
    double a = vs[j].dot(w);
    alpha.push_back(a);
    w -= a * vs[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : vs) w -= u.dot(w) * u;
    double b = w.norm();

    // Ritz values of the current tridiagonal
    int mcur = j + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mcur, mcur);
    for (int i = 0; i < mcur; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < mcur) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    double resid = b * std::abs(es.eigenvectors()(mcur - 1, 0));
    history.push_back(resid);
    bool done = mcur >= 2 && resid < tol * std::max(1.0, std::abs(es.eigenvalues()[0]));
    if (done || b < 1e-13 || j + 1 == m_max || mcur == n) {
      if (!done && b >= 1e-13 && mcur < n) {
        std::string hist;
        for (size_t i = history.size() > 5 ? history.size() - 5 : 0;
             i < history.size(); ++i)
          hist += " " + std::to_string(history[i]);
        throw std::runtime_error("lanczos: no convergence; residuals:" + hist);
      }
      e0 = es.eigenvalues()[0];
      e1 = mcur >= 2 ? es.eigenvalues()[1] : e0;
      ground = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < mcur; ++i) ground += es.eigenvectors()(i, 0) * vs[i];
      ground.normalize();
      return;
    }
    beta.push_back(b);
    vs.push_back(w / b);
  }
}

}  // namespace

SpectralResult ground_state(const SparseHamiltonian& H, const FockBasis& basis,
                            const ConfiningPotential* V, double tol) {
  if (H.dim != basis.size())
    throw ValidationError("ground_state: basis/matrix dimension mismatch");
  SpectralResult r;
  double e1 = 0.0;
  // Dense below ~1500: infrared scans have spectral gaps of order k_min, where
  // unpreconditioned Krylov iteration stalls; dense is seconds at this size.
  if (H.dim <= 1500) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H.mat)};
    r.E0 = es.eigenvalues()[0];
    e1 = H.dim > 1 ? es.eigenvalues()[1] : r.E0;
    r.ground_vector = es.eigenvectors().col(0);
  } else {
    lanczos(H.mat, tol, r.E0, e1, r.ground_vector);
  }
  r.gap = e1 - r.E0;

  double vmax = r.ground_vector.cwiseAbs().maxCoeff();
  for (long i = 0; i < H.dim; ++i) {
    if (std::abs(r.ground_vector[i]) > 1e-8 * vmax) {
      if (r.ground_vector[i] < 0.0) r.ground_vector = -r.ground_vector;
      break;
    }
  }
  r.residual = (H.mat * r.ground_vector - r.E0 * r.ground_vector).norm();

  for (int o = 0; o < static_cast<int>(basis.occ.size()); ++o) {
    int N = basis.total_occupancy(o);
    if (N == 0) continue;
    for (int p = 0; p < basis.n_sites; ++p) {
      double c = r.ground_vector[basis.state(o, p)];
      r.mean_boson_number += N * c * c;
    }
  }

  // vacuum sector is occupation index 0 (all-zero multi-index comes first)
  Eigen::VectorXd vac(basis.n_sites);
  for (int p = 0; p < basis.n_sites; ++p) vac[p] = r.ground_vector[basis.state(0, p)];
  if (basis.n_sites == 1) {
    r.vacuum_overlap = vac[0] * vac[0];
  } else {
    AssemblyData d = make_data(basis, FormFactor::make(0.0, 1.0),
                               InfraredProfile::make(IrVariant::Zero), V);
    Eigen::MatrixXd hp = Eigen::MatrixXd::Zero(basis.n_sites, basis.n_sites);
    for (int p = 0; p < basis.n_sites; ++p) {
      hp(p, p) = d.hp_diag[p];
      if (p + 1 < basis.n_sites) hp(p, p + 1) = hp(p + 1, p) = d.hp_off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hp);
    double ov = es.eigenvectors().col(0).dot(vac);
    r.vacuum_overlap = ov * ov;
  }
  return r;
}

VanHove van_hove_oracle(const ModeGrid& grid, const FormFactor& ff,
                        const InfraredProfile& ir, const Vec3& q) {
  VanHove out;
  for (const auto& m : grid.modes) {
    double k = m.k.norm();
    double rh = ff.rho_hat(k);
    double hh = ir.h_hat(k);
    double ph = m.k.dot(q);
    double re = std::cos(ph) - hh, im = std::sin(ph);
    double c2 = re * re + im * im;
    out.E0 += -m.w * rh * rh / (k * k) * hh * re;  // counterterm
    out.E0 -= m.w * rh * rh * c2 / (2.0 * k * k);
    out.N += m.w * rh * rh * c2 / (2.0 * k * k * k);
  }
  return out;
}

std::vector<IrScanRow> ir_scan(const std::vector<double>& k_mins,
                               const BasisTemplate& tmpl, const FormFactor& ff,
                               const InfraredProfile& ir,
                               const ConfiningPotential* V) {
  std::vector<IrScanRow> rows;
  for (double k_min : k_mins) {
    IrScanRow row;
    row.k_min = k_min;
    row.n_max = tmpl.n_max;
    try {
      auto grid = ModeGrid::build(k_min, tmpl.k_max, tmpl.n_shells, tmpl.n_dirs);
      FockBasis basis;
      switch (tmpl.dof) {
        case ParticleDof::Static:
          basis = FockBasis::make_static(grid, tmpl.n_max, tmpl.q0);
          break;
        case ParticleDof::Grid1D:
          basis = FockBasis::make_grid1d(grid, tmpl.n_max, tmpl.n_sites, tmpl.spacing);
          break;
        case ParticleDof::RadialGrid:
          basis = FockBasis::make_radial(grid, tmpl.n_max, tmpl.n_sites, tmpl.R_max);
          break;
      }
      row.M = basis.n_modes;
      auto H = build_hamiltonian(basis, ff, ir, V);
      auto res = ground_state(H, basis, V);
      row.E0 = res.E0;
      row.gap = res.gap;
      row.N_mean = res.mean_boson_number;
      row.vacuum_overlap = res.vacuum_overlap;
      row.residual = res.residual;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

SparseHamiltonian transform_observable(const FockBasis& basis, const FormFactor& ff,
                                       const InfraredProfile& ir, Observable obs,
                                       int mode_pair) {
  SparseHamiltonian A;
  A.dim = basis.size();
  A.mat.resize(A.dim, A.dim);
  std::vector<Eigen::Triplet<double>> trip;

  switch (obs) {
    case Observable::Identity:
      for (long i = 0; i < A.dim; ++i) trip.emplace_back(i, i, 1.0);
      break;
    case Observable::ParticleR2:
      for (int o = 0; o < static_cast<int>(basis.occ.size()); ++o)
        for (int p = 0; p < basis.n_sites; ++p)
          trip.emplace_back(basis.state(o, p), basis.state(o, p),
                            basis.site(p).squaredNorm());
      break;
    case Observable::FieldQuadrature: {
      int m = 2 * mode_pair;  // cosine mode of the pair
      if (m < 0 || m >= basis.n_modes)
        throw ValidationError("transform_observable: mode pair out of range");
      double k = basis.mode_k[m];
      double shift = gamma_hat(ff, ir, k);
      double pre = 1.0 / (2.0 * std::sqrt(basis.omega[m] * basis.mode_weight[m]));
      std::vector<int> tmp;
      for (int o = 0; o < static_cast<int>(basis.occ.size()); ++o) {
        for (int p = 0; p < basis.n_sites; ++p)
          trip.emplace_back(basis.state(o, p), basis.state(o, p), shift);
        if (basis.occ[o][m] == 0) continue;
        tmp = basis.occ[o];
        tmp[m]--;
        int o2 = basis.occ_index.at(tmp);
        double v = pre * std::sqrt(static_cast<double>(basis.occ[o][m]));
        for (int p = 0; p < basis.n_sites; ++p) {
          trip.emplace_back(basis.state(o, p), basis.state(o2, p), v);
          trip.emplace_back(basis.state(o2, p), basis.state(o, p), v);
        }
      }
      break;
    }
  }
  A.mat.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace nelson
