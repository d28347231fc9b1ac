#include "core/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace nelson {

FormFactor FormFactor::make(double e, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("form factor: uv_width must be > 0");
  FormFactor ff;
  ff.charge = e;
  ff.uv_width = lambda;
  return ff;
}

InfraredProfile InfraredProfile::make(IrVariant v, double kappa) {
  if (v == IrVariant::GaussianBump && !(kappa > 0.0))
    throw ValidationError("ir profile: kappa must be > 0");
  InfraredProfile ir;
  ir.variant = v;
  ir.kappa = kappa;
  return ir;
}

IrVariant ir_variant_from_string(const std::string& s) {
  if (s == "zero") return IrVariant::Zero;
  if (s == "unit") return IrVariant::Unit;
  if (s == "gaussian_bump") return IrVariant::GaussianBump;
  throw ValidationError("unknown ir variant: " + s);
}

std::string to_string(IrVariant v) {
  switch (v) {
    case IrVariant::Zero: return "zero";
    case IrVariant::Unit: return "unit";
    case IrVariant::GaussianBump: return "gaussian_bump";
  }
  return "?";
}

double ConfiningPotential::min_value(double r_max) const {
  double m = core(0.0);
  for (int i = 1; i <= 2000; ++i) m = std::min(m, core(r_max * i / 2000.0));
  return m;
}

ConfiningPotential ConfiningPotential::power(double C, double s) {
  if (!(C > 0.0)) throw ValidationError("potential: C must be > 0");
  if (!(s > 1.0)) throw ValidationError("potential: s must be > 1");
  ConfiningPotential v;
  v.C = C;
  v.s = s;
  v.core = [C, s](double r) { return C * std::pow(r, 2.0 * s); };
  return v;
}

ConfiningPotential ConfiningPotential::harmonic(double omega) {
  ConfiningPotential v;
  v.C = 0.5 * omega * omega;
  v.s = 1.0;
  v.core = [c = v.C](double r) { return c * r * r; };
  return v;
}

std::vector<Vec3> direction_set(int n_dirs) {
  if (n_dirs < 2 || n_dirs % 2 != 0)
    throw ValidationError("direction set: n_dirs must be even and >= 2");
  const int half = n_dirs / 2;
  std::vector<Vec3> base;
  const Vec3 axes[3] = {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  for (int i = 0; i < std::min(half, 3); ++i) base.push_back(axes[i]);
  // Remaining directions from a golden-angle spiral on the upper hemisphere.
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 3; i < half; ++i) {
    double z = (i - 2.5) / (half - 2.0);  // in (0,1)
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    base.emplace_back(r * std::cos(ga * i), r * std::sin(ga * i), z);
  }
  std::vector<Vec3> dirs;
  dirs.reserve(n_dirs);
  for (const auto& d : base) {
    dirs.push_back(d);
    dirs.push_back(-d);
  }
  return dirs;
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1], orders 1..5.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: {
      double a = 1.0 / std::sqrt(3.0);
      x = {-a, a};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      double a = std::sqrt(0.6);
      x = {-a, 0.0, a};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default: {
      double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
  }
}

}  // namespace

ModeGrid ModeGrid::build(double k_min, double k_max, int n_shells, int n_dirs) {
  if (!(k_min > 0.0))
    throw ValidationError("mode grid: k_min must be > 0 (massless dispersion)");
  if (!(k_min < k_max)) throw ValidationError("mode grid: need k_min < k_max");
  if (n_shells < 1 || n_dirs < 1) throw ValidationError("mode grid: n_shells, n_dirs >= 1");

  // Radial rule: composite Gauss-Legendre on log-spaced intervals, at most 4
  // points per interval.
  int n_int = (n_shells + 3) / 4;
  std::vector<int> pts(n_int, n_shells / n_int);
  for (int i = 0; i < n_shells % n_int; ++i) pts[i]++;

  ModeGrid g;
  g.k_min = k_min;
  g.k_max = k_max;
  const double lr = std::log(k_max / k_min);
  for (int i = 0; i < n_int; ++i) {
    double a = k_min * std::exp(lr * i / n_int);
    double b = k_min * std::exp(lr * (i + 1) / n_int);
    std::vector<double> x, w;
    gauss_legendre(pts[i], x, w);
    for (size_t j = 0; j < x.size(); ++j) {
      double k = 0.5 * (a + b) + 0.5 * (b - a) * x[j];
      double wk = 0.5 * (b - a) * w[j];
      g.radial_nodes.push_back(k);
      g.radial_weights.push_back(4.0 * M_PI * k * k * wk);
    }
  }

  auto dirs = direction_set(n_dirs);
  for (size_t i = 0; i < g.radial_nodes.size(); ++i) {
    for (const auto& d : dirs)
      g.modes.push_back({g.radial_nodes[i] * d, g.radial_weights[i] / n_dirs});
  }
  // Antipode table; directions come in adjacent (+d, -d) pairs.
  g.antipode.resize(g.modes.size());
  for (int m = 0; m < g.size(); ++m) {
    int shell = m / n_dirs, d = m % n_dirs;
    g.antipode[m] = shell * n_dirs + (d % 2 == 0 ? d + 1 : d - 1);
  }
  return g;
}

TimeGrid TimeGrid::make(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ValidationError("time grid: T, dt must be > 0");
  int n_steps = static_cast<int>(std::lround(2.0 * T / dt));
  if (n_steps < 1 || std::abs(n_steps * dt - 2.0 * T) > 1e-9 * T)
    throw ValidationError("time grid: 2T must be an integer multiple of dt");
  TimeGrid tg;
  tg.T = T;
  tg.dt = dt;
  tg.nodes.resize(n_steps + 1);
  tg.weights.assign(n_steps + 1, dt);
  for (int i = 0; i <= n_steps; ++i) tg.nodes[i] = -T + i * dt;
  if (n_steps % 2 == 0) tg.nodes[n_steps / 2] = 0.0;
  tg.weights.front() = tg.weights.back() = 0.5 * dt;
  return tg;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 15, 1e-12, &err);
  if (err > std::max(abs_tol, 1e-11 * std::abs(val)))
    throw std::runtime_error("quadrature did not converge: estimate " +
                             std::to_string(val) + ", error bound " + std::to_string(err));
  return val;
}

double radial_fourier(const std::function<double(double)>& fhat, double r,
                      double k_max, double abs_tol) {
  if (r < 1e-12) {
    return 4.0 * M_PI *
           integrate([&](double k) { return k * k * fhat(k); }, 0.0, k_max, abs_tol);
  }
  return 4.0 * M_PI / r *
         integrate([&](double k) { return k * fhat(k) * std::sin(k * r); }, 0.0, k_max,
                   abs_tol);
}

}  // namespace nelson
