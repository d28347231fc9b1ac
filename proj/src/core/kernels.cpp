#include "core/kernels.hpp"

#include <cmath>

#include "core/model.hpp"

namespace nelson {

namespace {

constexpr double k2pi6_inv = FormFactor::k2pi3_inv * FormFactor::k2pi3_inv;

// W at e = Lambda = 1 in scaled units; everything else rescales onto this.
double w_unit(double r, double tau, double abs_tol) {
  const double k_uv = std::sqrt(32.0 * std::log(10.0));
  if (r < 1e-12) {
    return -M_PI * k2pi6_inv *
           integrate([tau](double k) { return k * std::exp(-0.5 * k * k - k * tau); },
                     0.0, k_uv, abs_tol);
  }
  return -M_PI / r * k2pi6_inv *
         integrate(
             [r, tau](double k) {
               return std::exp(-0.5 * k * k - k * tau) * std::sin(k * r);
             },
             0.0, k_uv, abs_tol);
}

}  // namespace

double pair_potential(const FormFactor& ff, double r, double tau, double abs_tol) {
  const double e = ff.charge, lam = ff.uv_width;
  if (e == 0.0) return 0.0;
  return e * e * lam * lam * w_unit(lam * std::abs(r), lam * std::abs(tau), abs_tol);
}

double pair_potential_grid(const FormFactor& ff, const ModeGrid& grid, const Vec3& q,
                           double t) {
  double sum = 0.0;
  for (const auto& m : grid.modes) {
    double k = m.k.norm();
    double rh = ff.rho_hat(k);
    sum += m.w * rh * rh / k * std::exp(-k * std::abs(t)) * std::cos(m.k.dot(q));
  }
  return -0.25 * sum;
}

double gamma_hat(const FormFactor& ff, const InfraredProfile& ir, double k) {
  if (!(k > 0.0)) throw ValidationError("gamma_hat is singular at k = 0");
  return -ff.rho_hat(k) * ir.h_hat(k) / (k * k);
}

double gamma_position(const FormFactor& ff, const InfraredProfile& ir, double r) {
  if (ir.variant == IrVariant::Zero || ff.charge == 0.0) return 0.0;
  const double k_uv = ff.k_uv();
  if (r < 1e-12) {
    return -4.0 * M_PI *
           integrate([&](double k) { return ff.rho_hat(k) * ir.h_hat(k); }, 0.0, k_uv);
  }
  return -4.0 * M_PI / r *
         integrate(
             [&](double k) {
               return k > 0.0 ? ff.rho_hat(k) * ir.h_hat(k) / k * std::sin(k * r) : 0.0;
             },
             0.0, k_uv);
}

double classical_minimizer(const FormFactor& ff, double r) {
  if (ff.charge == 0.0) return 0.0;
  const double k_uv = ff.k_uv();
  if (r < 1e-12) {
    return -4.0 * M_PI * integrate([&](double k) { return ff.rho_hat(k); }, 0.0, k_uv);
  }
  return -4.0 * M_PI / r *
         integrate(
             [&](double k) { return k > 0.0 ? ff.rho_hat(k) / k * std::sin(k * r) : 0.0; },
             0.0, k_uv);
}

double classical_minimizer_closed(const FormFactor& ff, double r) {
  const double e = ff.charge, lam = ff.uv_width;
  if (r < 1e-10) return -e * lam / (2.0 * std::pow(M_PI, 1.5));
  return -e * std::erf(lam * r) / (4.0 * M_PI * r);
}

double field_covariance(double k, double dtau) {
  if (!(k > 0.0)) throw ValidationError("field covariance is singular at k = 0");
  return std::exp(-k * std::abs(dtau)) / (2.0 * k);
}

double boundary_energy(const ParticlePath& path, double T, const FormFactor& ff,
                       const InfraredProfile& ir, const ModeGrid& grid,
                       BoundaryTail tail) {
  const TimeGrid& tg = path.tg;
  if (std::abs(tg.T - T) > 1e-9 || path.q.size() != tg.nodes.size())
    throw ValidationError("boundary_energy: path does not cover [-T, T]");
  if (ir.variant == IrVariant::Zero || ff.charge == 0.0) return 0.0;

  const int nt = tg.size();
  const int nk = static_cast<int>(grid.radial_nodes.size());

  // tail_i(k): weight of the |s| > T complement of the time integral.
  std::vector<double> tails(static_cast<size_t>(nt) * nk);
  for (int j = 0; j < nk; ++j) {
    double k = grid.radial_nodes[j];
    for (int i = 0; i < nt; ++i) {
      double t = tg.nodes[i];
      if (tail == BoundaryTail::ClosedForm) {
        tails[i * nk + j] = (std::exp(-k * (T - t)) + std::exp(-k * (T + t))) / k;
      } else {
        double s = 0.0;
        for (int l = 0; l < nt; ++l)
          s += tg.weights[l] * std::exp(-k * std::abs(t - tg.nodes[l]));
        tails[i * nk + j] = 2.0 / k - s;
      }
    }
  }

  double total = 0.0;
  const int n_dirs = grid.size() / nk;
  for (int j = 0; j < nk; ++j) {
    double k = grid.radial_nodes[j];
    double rh = ff.rho_hat(k);
    double pref = rh * rh * ir.h_hat(k) / (2.0 * k);
    double acc = 0.0;
    for (int i = 0; i < nt; ++i) {
      double cs = 0.0;
      for (int d = 0; d < n_dirs; ++d) {
        const auto& m = grid.modes[j * n_dirs + d];
        cs += m.w * std::cos(m.k.dot(path.q[i]));
      }
      acc += tg.weights[i] * cs * tails[i * nk + j];
    }
    total += pref * acc;
  }
  return -total;
}

KernelCache::KernelCache(double r_max, double tau_max, int nr, int ntau)
    : r_max_(r_max), tau_max_(tau_max), nr_(nr), ntau_(ntau) {
  hr_ = std::asinh(r_max_) / (nr_ - 1);
  htau_ = std::asinh(tau_max_) / (ntau_ - 1);
  // One extra node past each top edge so the cubic stencil stays in range.
  table_.resize(static_cast<size_t>(nr_ + 1) * (ntau_ + 1));
  for (int i = 0; i <= nr_; ++i) {
    double r = std::sinh(i * hr_);
    for (int j = 0; j <= ntau_; ++j) {
      double tau = std::sinh(j * htau_);
      table_[static_cast<size_t>(i) * (ntau_ + 1) + j] = w_unit(r, tau, 1e-12);
    }
  }
}

namespace {

inline double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
  return 0.5 * ((2.0 * p0) + (-pm1 + p1) * t + (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2) * t * t +
                (-pm1 + 3.0 * p0 - 3.0 * p1 + p2) * t * t * t);
}

}  // namespace

double KernelCache::lookup_scaled(double r, double tau) const {
  double u = std::asinh(r) / hr_;
  double v = std::asinh(tau) / htau_;
  int iu = std::min(static_cast<int>(u), nr_ - 2);
  int iv = std::min(static_cast<int>(v), ntau_ - 2);
  double fu = u - iu, fv = v - iv;
  // Even extension across r = 0 and tau = 0 makes the edge stencil exact.
  auto at = [&](int i, int j) {
    i = std::abs(i);
    j = std::abs(j);
    return table_[static_cast<size_t>(i) * (ntau_ + 1) + j];
  };
  double rows[4];
  for (int di = -1; di <= 2; ++di) {
    rows[di + 1] = catmull_rom(at(iu + di, iv - 1), at(iu + di, iv), at(iu + di, iv + 1),
                               at(iu + di, iv + 2), fv);
  }
  return catmull_rom(rows[0], rows[1], rows[2], rows[3], fu);
}

double KernelCache::w(const FormFactor& ff, double r, double tau) const {
  const double e = ff.charge, lam = ff.uv_width;
  if (e == 0.0) return 0.0;
  double rs = lam * std::abs(r), ts = lam * std::abs(tau);
  if (rs > r_max_ || ts > tau_max_) {
    fallbacks_.fetch_add(1, std::memory_order_relaxed);
    return e * e * lam * lam * w_unit(rs, ts, 1e-12);
  }
  return e * e * lam * lam * lookup_scaled(rs, ts);
}

}  // namespace nelson
