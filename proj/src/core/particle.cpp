#include "core/particle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nelson {

namespace {

// Smallest eigenpair of the tridiagonal operator -1/2 u'' + V u with
// Dirichlet conditions, by inverse iteration with a shift below the spectrum.
void smallest_eigenpair(const std::vector<double>& vdiag, double dr, double& eval,
                        std::vector<double>& evec) {
  const int n = static_cast<int>(vdiag.size());
  const double off = -0.5 / (dr * dr);
  const double diag_kin = 1.0 / (dr * dr);
  double shift = *std::min_element(vdiag.begin(), vdiag.end()) - 1.0;

  std::vector<double> x(n, 1.0), b(n), c(n), d(n);
  for (int i = 0; i < n; ++i) x[i] = std::exp(-0.1 * i * dr);

  double theta = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    // Thomas solve (A - shift) y = x.
    for (int i = 0; i < n; ++i) d[i] = diag_kin + vdiag[i] - shift;
    c[0] = off / d[0];
    b[0] = x[0] / d[0];
    for (int i = 1; i < n; ++i) {
      double m = d[i] - off * c[i - 1];
      c[i] = off / m;
      b[i] = (x[i] - off * b[i - 1]) / m;
    }
    for (int i = n - 2; i >= 0; --i) b[i] -= c[i] * b[i + 1];

    double norm = 0.0;
    for (double v : b) norm += v * v;
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) x[i] = b[i] / norm;

    // Rayleigh quotient.
    double num = 0.0;
    for (int i = 0; i < n; ++i) {
      double ax = (diag_kin + vdiag[i]) * x[i];
      if (i > 0) ax += off * x[i - 1];
      if (i + 1 < n) ax += off * x[i + 1];
      num += x[i] * ax;
    }
    if (iter > 4 && std::abs(num - theta) < 1e-14 * std::abs(num)) {
      theta = num;
      break;
    }
    theta = num;
  }
  eval = theta;
  evec = x;
}

double solve_energy(const ConfiningPotential& V, double R_max, int n,
                    std::vector<double>* u_out) {
  const double dr = R_max / n;
  std::vector<double> vdiag(n - 1);
  for (int i = 1; i < n; ++i) vdiag[i - 1] = V(i * dr);
  double e;
  std::vector<double> u;
  smallest_eigenpair(vdiag, dr, e, u);
  if (u_out) *u_out = std::move(u);
  return e;
}

}  // namespace

GroundStateSolution solve_ground_state(const ConfiningPotential& V, double R_max,
                                       int n_grid) {
  if (!(R_max > 0.0) || n_grid < 16)
    throw ValidationError("ground state: R_max > 0 and n_grid >= 16 required");

  GroundStateSolution gs;
  gs.V = V;
  gs.R_max = R_max;
  gs.dr = R_max / n_grid;

  std::vector<double> u_int;
  double e_fine = solve_energy(V, R_max, n_grid, &u_int);
  double e_coarse = solve_energy(V, R_max, n_grid / 2, nullptr);
  gs.Ep = (4.0 * e_fine - e_coarse) / 3.0;  // Richardson in dr^2

  const int n = n_grid;
  gs.r.resize(n + 1);
  gs.u.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) gs.r[i] = i * gs.dr;
  double sgn = 0.0;
  for (double v : u_int) sgn += v;
  for (int i = 1; i < n; ++i) gs.u[i] = (sgn >= 0 ? u_int[i - 1] : -u_int[i - 1]);

  // Ground state must be nodeless and positive down to the noise floor of the
  // eigensolve; beyond that the tail is clamped to zero.
  double u_max = *std::max_element(gs.u.begin(), gs.u.end());
  int i_rel = n - 1;
  while (i_rel > 1 && gs.u[i_rel] < 1e-12 * u_max) --i_rel;
  for (int i = 1; i <= i_rel; ++i) {
    if (gs.u[i] <= 0.0)
      throw std::runtime_error("ground state solver: non-positive interior value; refine grid");
  }
  for (int i = i_rel + 1; i < n; ++i) gs.u[i] = std::max(gs.u[i], 0.0);
  if (gs.u[n - 1] / u_max > 1e-10)
    throw ValidationError("ground state: R_max too small, psi_0 not decayed at the edge");

  // Normalize 4 pi int u^2 dr = 1.
  double s = 0.0;
  for (int i = 0; i <= n; ++i)
    s += (i == 0 || i == n ? 0.5 : 1.0) * gs.u[i] * gs.u[i] * gs.dr;
  double scale = 1.0 / std::sqrt(4.0 * M_PI * s);
  for (auto& v : gs.u) v *= scale;

  gs.psi.assign(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) gs.psi[i] = gs.u[i] / gs.r[i];
  gs.psi[0] = 2.0 * gs.psi[1] - gs.psi[2];  // psi is even and smooth at 0

  // Discretization residual via a 4th-order stencil on u (independent of the
  // 2nd-order operator used for the solve).
  double rnum = 0.0, rden = 0.0;
  for (int i = 2; i < n - 1; ++i) {
    double d2 = (-gs.u[i - 2] + 16 * gs.u[i - 1] - 30 * gs.u[i] + 16 * gs.u[i + 1] -
                 gs.u[i + 2]) /
                (12.0 * gs.dr * gs.dr);
    double res = -0.5 * d2 + (V(gs.r[i]) - gs.Ep) * gs.u[i];
    rnum += res * res;
    rden += gs.u[i] * gs.u[i];
  }
  gs.residual = std::sqrt(rnum / rden);
  if (gs.residual > 1e-3 * std::abs(gs.Ep))
    throw std::runtime_error("ground state solver: residual too large; refine the grid");

  // Drift table psi'/psi = u'/u - 1/r (centered differences); past the
  // reliable range the WKB tail in drift_radial takes over.
  u_max = *std::max_element(gs.u.begin(), gs.u.end());
  gs.log_slope.assign(n + 1, 0.0);
  gs.r_reliable = gs.R_max;
  for (int i = 1; i < n; ++i) {
    if (gs.u[i] / u_max < 1e-10) {
      if (gs.r[i] > gs.r[1] && gs.r_reliable == gs.R_max && i > n / 4)
        gs.r_reliable = gs.r[i - 1];
      continue;
    }
    double du = (gs.u[i + 1] - gs.u[i - 1]) / (2.0 * gs.dr);
    gs.log_slope[i] = du / gs.u[i] - 1.0 / gs.r[i];
  }
  gs.log_slope[n] = gs.log_slope[n - 1];

  // Radial CDF of nu0.
  gs.cdf.assign(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    gs.cdf[i] = gs.cdf[i - 1] +
                2.0 * M_PI * (gs.u[i - 1] * gs.u[i - 1] + gs.u[i] * gs.u[i]) * gs.dr;
  }
  double c_end = gs.cdf[n];
  for (auto& c : gs.cdf) c /= c_end;
  return gs;
}

double GroundStateSolution::psi_at(double radius) const {
  if (radius >= R_max) return 0.0;
  double x = radius / dr;
  int i = std::min(static_cast<int>(x), static_cast<int>(r.size()) - 2);
  double f = x - i;
  return psi[i] * (1.0 - f) + psi[i + 1] * f;
}

double GroundStateSolution::radial_density(double radius) const {
  double p = psi_at(radius);
  return 4.0 * M_PI * radius * radius * p * p;
}

double GroundStateSolution::drift_radial(double radius) const {
  if (radius <= 0.0) return 0.0;
  double edge = std::min(0.95 * R_max, r_reliable);
  if (radius > edge) {
    // WKB tail: psi'/psi ~ -sqrt(2 (V - Ep)).
    return -std::sqrt(std::max(0.0, 2.0 * (V(radius) - Ep)));
  }
  double x = radius / dr;
  int i = std::min(static_cast<int>(x), static_cast<int>(r.size()) - 2);
  double f = x - i;
  return log_slope[i] * (1.0 - f) + log_slope[i + 1] * f;
}

Vec3 GroundStateSolution::drift(const Vec3& x) const {
  double radius = x.norm();
  if (radius < 1e-12) return Vec3::Zero();
  return drift_radial(radius) / radius * x;
}

double GroundStateSolution::cdf_at(double radius) const {
  if (radius <= 0.0) return 0.0;
  if (radius >= R_max) return 1.0;
  double x = radius / dr;
  int i = std::min(static_cast<int>(x), static_cast<int>(r.size()) - 2);
  double f = x - i;
  return cdf[i] * (1.0 - f) + cdf[i + 1] * f;
}

double GroundStateSolution::cdf_inverse(double uq) const {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), uq);
  if (it == cdf.begin()) return 0.0;
  if (it == cdf.end()) return R_max;
  int i = static_cast<int>(it - cdf.begin());
  double c0 = cdf[i - 1], c1 = cdf[i];
  double f = (c1 > c0) ? (uq - c0) / (c1 - c0) : 0.0;
  return r[i - 1] + f * dr;
}

std::vector<Vec3> sample_stationary(const GroundStateSolution& gs, std::uint64_t seed,
                                    int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double radius = gs.cdf_inverse(unif(rng));
    double z = 2.0 * unif(rng) - 1.0;
    double phi = 2.0 * M_PI * unif(rng);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(radius * rho * std::cos(phi), radius * rho * std::sin(phi),
                     radius * z);
  }
  return out;
}

ParticlePath sample_path(const GroundStateSolution& gs, const TimeGrid& tg,
                         std::uint64_t seed, double noise_scale) {
  // Step-size guard at the typical radius.
  double r_med = gs.cdf_inverse(0.5);
  double d_med = gs.drift_radial(r_med);
  if (tg.dt * d_med * d_med >= 1.0)
    throw ValidationError("sample_path: dt too large for the drift scale");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ParticlePath path;
  path.tg = tg;
  path.q.resize(tg.size());

  double radius = gs.cdf_inverse(unif(rng));
  double z = 2.0 * unif(rng) - 1.0;
  double phi = 2.0 * M_PI * unif(rng);
  double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  path.q[0] = Vec3(radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z);

  const double sdt = std::sqrt(tg.dt) * noise_scale;
  for (int i = 1; i < tg.size(); ++i) {
    const Vec3& q = path.q[i - 1];
    Vec3 noise(gauss(rng), gauss(rng), gauss(rng));
    path.q[i] = q + gs.drift(q) * tg.dt + sdt * noise;
    if (path.q[i].norm() > gs.R_max) {
      throw std::runtime_error("sample_path: path escaped the solver grid at t = " +
                               std::to_string(tg.nodes[i]) +
                               ", |q| = " + std::to_string(path.q[i].norm()));
    }
  }
  return path;
}

double stationary_moment(const GroundStateSolution& gs, double b) {
  if (b < 0.0) throw ValidationError("stationary_moment: b must be >= 0");
  double s = 0.0;
  const int n = static_cast<int>(gs.r.size()) - 1;
  for (int i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * (gs.r[i] + b) * 4.0 * M_PI * gs.u[i] * gs.u[i] * gs.dr;
  }
  return s;
}

}  // namespace nelson
