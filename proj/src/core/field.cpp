#include "core/field.hpp"

#include <cmath>
#include <random>

namespace nelson {

GaussianLaw GaussianLaw::centred(const ModeGrid& grid) {
  GaussianLaw law;
  law.grid = grid;
  const int n = grid.size();
  law.mean.assign(n, Complex(0.0, 0.0));
  law.variance.resize(n);
  law.relaxation.resize(n);
  for (int j = 0; j < n; ++j) {
    double k = grid.modes[j].k.norm();
    law.variance[j] = 0.5 / k;
    law.relaxation[j] = k;
  }
  return law;
}

GaussianLaw GaussianLaw::shifted(const ModeGrid& grid, const FormFactor& ff,
                                 const InfraredProfile& ir) {
  GaussianLaw law = centred(grid);
  for (int j = 0; j < grid.size(); ++j) {
    double k = grid.modes[j].k.norm();
    law.mean[j] = std::sqrt(grid.modes[j].w) * gamma_hat(ff, ir, k);
  }
  return law;
}

FieldTrajectory sample_field(const GaussianLaw& law, const TimeGrid& tg,
                             std::uint64_t seed) {
  const ModeGrid& grid = law.grid;
  const int nm = grid.size();
  const int nt = tg.size();

  FieldTrajectory traj;
  traj.tg = tg;
  traj.values.assign(nt, std::vector<Complex>(nm));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int j = 0; j < nm; ++j) {
    int ja = grid.antipode[j];
    if (ja < j) continue;  // sample each pair once, mirror the antipode
    const double k = law.relaxation[j];
    const double sd = std::sqrt(0.5 * law.variance[j]);  // per real component
    const double alpha = std::exp(-k * tg.dt);
    const double step_sd = sd * std::sqrt(1.0 - alpha * alpha);
    const double mre = law.mean[j].real(), mim = law.mean[j].imag();

    double xr = mre + sd * gauss(rng);
    double xi = mim + sd * gauss(rng);
    for (int i = 0; i < nt; ++i) {
      if (i > 0) {
        xr = mre + alpha * (xr - mre) + step_sd * gauss(rng);
        xi = mim + alpha * (xi - mim) + step_sd * gauss(rng);
      }
      traj.values[i][j] = Complex(xr, xi);
      traj.values[i][ja] = Complex(xr, -xi);
    }
  }
  return traj;
}

void apply_shift(FieldTrajectory& traj, const GaussianLaw& law, double sign) {
  for (auto& row : traj.values)
    for (size_t j = 0; j < row.size(); ++j) row[j] += sign * law.mean[j];
}

DressingFunction conditional_mean(const ParticlePath& path, const ModeGrid& grid,
                                  const InfraredProfile& ir, const FormFactor& ff,
                                  double t, DressingForm form) {
  const TimeGrid& tg = path.tg;
  const double T = tg.T;
  if (t < -T - 1e-12 || t > T + 1e-12)
    throw ValidationError("conditional_mean: t outside the path window");

  DressingFunction g;
  g.t = t;
  g.T = T;
  g.g_hat.resize(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const Vec3& kv = grid.modes[j].k;
    const double k = kv.norm();
    const double rh = ff.rho_hat(k);
    const double hh = ir.h_hat(k);

    Complex osc(0.0, 0.0);  // trapezoid of e^{-k|t-tau|} e^{ik q_tau}
    for (int i = 0; i < tg.size(); ++i) {
      double kern = std::exp(-k * std::abs(t - tg.nodes[i]));
      double ph = kv.dot(path.q[i]);
      osc += tg.weights[i] * kern * Complex(std::cos(ph), std::sin(ph));
    }
    double tail = (std::exp(-k * (T - t)) + std::exp(-k * (T + t))) / k;

    if (form == DressingForm::A) {
      // closed form for the pure-exponential h-part: int_{-T}^{T} = 2/k - tail
      g.g_hat[j] =
          gamma_hat(ff, ir, k) - rh / (2.0 * k) * (osc - hh * (2.0 / k - tail));
    } else {
      g.g_hat[j] = -rh / (2.0 * k) * osc - rh * hh / (2.0 * k) * tail;
    }
  }
  return g;
}

double log_gaussian_exp_functional(const std::vector<double>& times,
                                   const Eigen::MatrixXcd& coeffs,
                                   const GaussianLaw& law) {
  const ModeGrid& grid = law.grid;
  const int nt = static_cast<int>(times.size());
  const int nm = grid.size();
  if (coeffs.rows() != nt || coeffs.cols() != nm)
    throw ValidationError("gaussian_exp_functional: coefficient shape mismatch");

  double cmax = 0.0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nm; ++j) cmax = std::max(cmax, std::abs(coeffs(i, j)));
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nm; ++j) {
      if (std::abs(coeffs(i, grid.antipode[j]) - std::conj(coeffs(i, j))) >
          1e-9 * (1.0 + cmax))
        throw ValidationError(
            "gaussian_exp_functional: coefficients are not conjugation-symmetric");
    }
  }

  Complex mean_term(0.0, 0.0);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nm; ++j) mean_term += coeffs(i, j) * law.mean[j];

  Complex var(0.0, 0.0);
  for (int j = 0; j < nm; ++j) {
    const int ja = grid.antipode[j];
    const double k = law.relaxation[j];
    const double v = law.variance[j];
    for (int i = 0; i < nt; ++i) {
      for (int l = 0; l < nt; ++l) {
        var += coeffs(i, j) * coeffs(l, ja) * v * std::exp(-k * std::abs(times[i] - times[l]));
      }
    }
  }
  return mean_term.real() + 0.5 * var.real();
}

double gaussian_exp_functional(const std::vector<double>& times,
                               const Eigen::MatrixXcd& coeffs,
                               const GaussianLaw& law) {
  return std::exp(log_gaussian_exp_functional(times, coeffs, law));
}

PartitionPair finite_mode_partition(const ParticlePath& path, const ModeGrid& grid,
                                    const FormFactor& ff, const InfraredProfile& ir) {
  const TimeGrid& tg = path.tg;
  const int nt = tg.size();
  const int nm = grid.size();

  // Interaction functional against the shifted field:
  // l = -sum_i dt_i sum_j sqrt(w_j) rho(k_j) (e^{ik_j q_i} - h_hat) a_i(k_j).
  Eigen::MatrixXcd coeffs(nt, nm);
  for (int j = 0; j < nm; ++j) {
    const Vec3& kv = grid.modes[j].k;
    double k = kv.norm();
    double pre = std::sqrt(grid.modes[j].w) * ff.rho_hat(k);
    double hh = ir.h_hat(k);
    for (int i = 0; i < nt; ++i) {
      double ph = kv.dot(path.q[i]);
      coeffs(i, j) =
          -tg.weights[i] * pre * (Complex(std::cos(ph), std::sin(ph)) - hh);
    }
  }

  PartitionPair out;
  out.log_z = log_gaussian_exp_functional(tg.nodes, coeffs,
                                          GaussianLaw::shifted(grid, ff, ir));

  double w_action = 0.0;
  for (int i = 0; i < nt; ++i) {
    for (int l = 0; l < nt; ++l) {
      w_action += tg.weights[i] * tg.weights[l] *
                  pair_potential_grid(ff, grid, path.q[i] - path.q[l],
                                      tg.nodes[i] - tg.nodes[l]);
    }
  }
  double bnd = boundary_energy(path, tg.T, ff, ir, grid, BoundaryTail::DiscreteComplement);
  out.log_zeta = -w_action - bnd;
  return out;
}

}  // namespace nelson
