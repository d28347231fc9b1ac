#ifndef NELSON_MODEL_HPP
#define NELSON_MODEL_HPP

// Model conventions and input functions.
//
// Fourier convention used throughout:
//   f(x)    = int e^{ik.x} fhat(k) dk
//   fhat(k) = (2pi)^-3 int e^{-ik.x} f(x) dx
// Dispersion omega(k) = |k| (massless field); hbar = c = particle mass = 1.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nelson {

using Vec3 = Eigen::Vector3d;

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Smearing of the point charge. Default profile is the normalized Gaussian
//   rho(x) = e (Lambda^2/pi)^{3/2} e^{-Lambda^2 |x|^2},
// so rho_hat(k) = e (2pi)^-3 e^{-k^2/(4 Lambda^2)} and int rho dx = e.
struct FormFactor {
  double charge = 1.0;    // e
  double uv_width = 1.0;  // Lambda > 0

  double rho_hat(double k) const {
    return charge * k2pi3_inv * std::exp(-k * k / (4.0 * uv_width * uv_width));
  }
  // k beyond which |rho_hat|^2 < 1e-16 |rho_hat(0)|^2; UV truncation for quadrature.
  double k_uv() const { return uv_width * std::sqrt(32.0 * std::log(10.0)); }

  static constexpr double k2pi3_inv = 1.0 / 248.05021344239853;  // (2pi)^-3

  static FormFactor make(double e, double lambda);
};

enum class IrVariant { Zero, Unit, GaussianBump };

// The auxiliary infrared profile h_hat. Unit and GaussianBump satisfy
// h_hat(0) = 1; Zero is the infrared-singular reference case.
struct InfraredProfile {
  IrVariant variant = IrVariant::Unit;
  double kappa = 1.0;

  double h_hat(double k) const {
    switch (variant) {
      case IrVariant::Zero: return 0.0;
      case IrVariant::Unit: return 1.0;
      case IrVariant::GaussianBump: return std::exp(-k * k / (2.0 * kappa * kappa));
    }
    return 0.0;
  }
  double sup() const { return variant == IrVariant::Zero ? 0.0 : 1.0; }

  static InfraredProfile make(IrVariant v, double kappa = 1.0);
};

IrVariant ir_variant_from_string(const std::string& s);
std::string to_string(IrVariant v);

// Confining potential, spherically symmetric, V(r) = C r^{2s} asymptotically.
// Superquadratic growth (s > 1) is assumed throughout; the harmonic case
// (s = 1) is kept as a solver oracle only.
struct ConfiningPotential {
  double C = 1.0;
  double s = 2.0;
  std::function<double(double)> core;  // r -> V(r)

  double operator()(double r) const { return core(r); }
  double min_value(double r_max = 20.0) const;

  static ConfiningPotential power(double C, double s);       // V = C r^{2s}
  static ConfiningPotential harmonic(double omega = 1.0);    // oracle, s = 1
};

struct Mode {
  Vec3 k;
  double w;  // quadrature weight > 0
};

// Finite wavevector quadrature: radial nodes on [k_min, k_max] times a
// direction set closed under v -> -v. Weights reproduce 4pi int k^2 dk on
// radial test functions.
struct ModeGrid {
  std::vector<Mode> modes;
  double k_min = 0.0, k_max = 0.0;
  std::vector<int> antipode;            // index of mode with k -> -k
  std::vector<double> radial_nodes;     // distinct |k| values
  std::vector<double> radial_weights;   // full-shell weight 4pi k^2 dk per node

  int size() const { return static_cast<int>(modes.size()); }

  static ModeGrid build(double k_min, double k_max, int n_shells, int n_dirs);
};

// Symmetric partition of [-T, T]; weights are trapezoid weights.
struct TimeGrid {
  double T = 0.0, dt = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  static TimeGrid make(double T, double dt);
};

// Direction set of n antipodally paired unit vectors (n even).
std::vector<Vec3> direction_set(int n_dirs);

// Radial 3D Fourier transform under the convention above:
//   f(r) = (4pi/r) int_0^kmax k fhat(k) sin(kr) dk  (radial fhat),
// with the r -> 0 limit taken analytically.
double radial_fourier(const std::function<double(double)>& fhat, double r,
                      double k_max, double abs_tol = 1e-12);

// Adaptive quadrature of int_a^b f, Gauss-Kronrod based.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

}  // namespace nelson

#endif
