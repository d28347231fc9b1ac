#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "core/fock.hpp"
#include "core/kernels.hpp"
#include "core/particle.hpp"

using namespace nelson;

namespace {

// Exact ground data of independent displaced modes: per real mode,
// omega a*a + lambda (a + a*) has E = -lambda^2/omega, <N> = lambda^2/omega^2.
struct Displaced {
  double E0 = 0.0, N = 0.0;
};

Displaced displaced_exact(const FockBasis& b, const FormFactor& ff,
                          const InfraredProfile& ir, const Vec3& q) {
  Displaced d;
  for (int m = 0; m < b.n_modes; ++m) {
    double k = b.mode_k[m];
    double pre = std::sqrt(b.mode_weight[m] / b.omega[m]) * ff.rho_hat(k);
    double ph = b.mode_kvec[m].dot(q);
    double lam = b.mode_is_sin[m] ? -pre * std::sin(ph)
                                  : pre * (std::cos(ph) - ir.h_hat(k));
    d.E0 -= lam * lam / b.omega[m];
    d.N += lam * lam / (b.omega[m] * b.omega[m]);
    if (!b.mode_is_sin[m]) {
      double rh = ff.rho_hat(k);
      d.E0 -= 2.0 * b.mode_weight[m] * rh * rh / (k * k) * ir.h_hat(k) *
              (std::cos(ph) - ir.h_hat(k));
    }
  }
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("fock");

TEST_CASE("zero charge decouples the field: vacuum ground state, E0 = 0") {
  auto grid = ModeGrid::build(0.5, 4.0, 3, 2);
  auto ff = FormFactor::make(0.0, 1.0);
  auto ir = InfraredProfile::make(IrVariant::Unit);
  auto basis = FockBasis::make_static(grid, 3, Vec3(0.3, 0, 0));
  auto H = build_hamiltonian(basis, ff, ir);
  auto res = ground_state(H, basis);
  CHECK(std::abs(res.E0) < 1e-12);
  CHECK(std::abs(res.mean_boson_number) < 1e-14);
  CHECK(res.vacuum_overlap == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.residual < 1e-9);
}

TEST_CASE("hand-assembled single-pair matrix matches the sparse assembly") {
  auto grid = ModeGrid::build(1.0, 2.0, 1, 2);
  REQUIRE(grid.size() == 2);
  auto ff = FormFactor::make(0.7, 1.3);
  auto ir = InfraredProfile::make(IrVariant::GaussianBump, 0.8);
  Vec3 q(0.2, -0.1, 0.4);
  auto basis = FockBasis::make_static(grid, 1, q);
  REQUIRE(basis.n_modes == 2);
  REQUIRE(basis.size() == 3);
  auto H = build_hamiltonian(basis, ff, ir);

  // independent element recomputation from the defining formulas
  double k = grid.modes[0].k.norm();
  double w = grid.modes[0].w;
  double rh = ff.charge / 248.05021344239853 * std::exp(-k * k / (4.0 * 1.3 * 1.3));
  double hh = std::exp(-k * k / (2.0 * 0.8 * 0.8));
  double ph = grid.modes[0].k.dot(q);
  double lam_c = std::sqrt(w / k) * rh * (std::cos(ph) - hh);
  double lam_s = -std::sqrt(w / k) * rh * std::sin(ph);
  double c0 = -2.0 * w * rh * rh / (k * k) * hh * (std::cos(ph) - hh);

  // occupation order: (0,0), (0,1), (1,0) with (cos, sin) mode layout
  Eigen::MatrixXd Hd = Eigen::MatrixXd(H.mat);
  CHECK(Hd(0, 0) == doctest::Approx(c0).epsilon(1e-14));
  CHECK(Hd(1, 1) == doctest::Approx(c0 + k).epsilon(1e-14));
  CHECK(Hd(2, 2) == doctest::Approx(c0 + k).epsilon(1e-14));
  CHECK(Hd(0, 1) == doctest::Approx(lam_s).epsilon(1e-14));
  CHECK(Hd(0, 2) == doctest::Approx(lam_c).epsilon(1e-14));
  CHECK(Hd(1, 0) == doctest::Approx(lam_s).epsilon(1e-14));
  CHECK(std::abs(Hd(1, 2)) < 1e-15);
}

TEST_CASE("static particle: solver reproduces the displaced-oscillator closed form") {
  auto grid = ModeGrid::build(0.5, 3.0, 2, 2);
  auto ff = FormFactor::make(0.4, 1.0);
  auto ir = InfraredProfile::make(IrVariant::Unit);
  Vec3 q(0.5, 0.2, -0.3);
  auto basis = FockBasis::make_static(grid, 6, q);
  auto H = build_hamiltonian(basis, ff, ir);
  auto res = ground_state(H, basis);
  auto ex = displaced_exact(basis, ff, ir, q);
  CHECK(std::abs(res.E0 - ex.E0) < 1e-12);
  CHECK(res.mean_boson_number == doctest::Approx(ex.N).epsilon(1e-8));
  double omega_min = *std::min_element(basis.omega.begin(), basis.omega.end());
  CHECK(res.gap == doctest::Approx(omega_min).epsilon(1e-8));
}

TEST_CASE("van Hove oracle agrees with the grid closed form and the solver") {
  auto grid = ModeGrid::build(0.5, 6.0, 2, 2);
  auto ff = FormFactor::make(0.4, 1.0);
  Vec3 q(0.3, 0.0, 0.6);
  for (auto v : {IrVariant::Zero, IrVariant::Unit}) {
    auto ir = InfraredProfile::make(v);
    auto vh = van_hove_oracle(grid, ff, ir, q);
    auto basis = FockBasis::make_static(grid, 8, q);
    auto ex = displaced_exact(basis, ff, ir, q);
    CHECK(vh.E0 == doctest::Approx(ex.E0).epsilon(1e-12));
    CHECK(vh.N == doctest::Approx(ex.N).epsilon(1e-12));

    auto res = ground_state(build_hamiltonian(basis, ff, ir), basis);
    CHECK(std::abs(res.E0 - vh.E0) < 1e-10);
    CHECK(res.mean_boson_number == doctest::Approx(vh.N).epsilon(1e-6).scale(1e-12));
  }
}

TEST_CASE("boson number of the singular case grows with the expected log slope") {
  auto ff = FormFactor::make(1.0, 1.0);
  auto ir = InfraredProfile::make(IrVariant::Zero);
  double n1 = van_hove_oracle(ModeGrid::build(1e-3, 8.0, 48, 2), ff, ir,
                              Vec3::Zero()).N;
  double n2 = van_hove_oracle(ModeGrid::build(1e-4, 8.0, 48, 2), ff, ir,
                              Vec3::Zero()).N;
  double slope = (n2 - n1) / std::log(10.0);
  double expected = 1.0 / (32.0 * std::pow(M_PI, 5));
  CHECK(slope == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("infrared scan dichotomy: regular profile converges, singular grows") {
  BasisTemplate tmpl;
  tmpl.n_shells = 12;
  tmpl.n_dirs = 2;
  tmpl.n_max = 3;
  tmpl.k_max = 6.0;
  tmpl.q0 = Vec3(0, 0, 0.7);  // away from the origin so both modes couple
  auto ff = FormFactor::make(1.0, 1.0);
  std::vector<double> k_mins = {0.3, 0.03, 0.003};

  auto unit = ir_scan(k_mins, tmpl, ff, InfraredProfile::make(IrVariant::Unit));
  auto zero = ir_scan(k_mins, tmpl, ff, InfraredProfile::make(IrVariant::Zero));
  for (const auto& r : unit) CHECK(r.ok);
  for (const auto& r : zero) CHECK(r.ok);

  // regular: boson number saturates as the infrared cutoff is removed; its
  // increment per decade is a small fraction of the singular profile's
  CHECK(std::abs(unit[2].N_mean - unit[1].N_mean) <
        0.05 * (zero[2].N_mean - zero[1].N_mean));
  // singular: growth per decade stays level, overlap decreases monotonically
  double g1 = zero[1].N_mean - zero[0].N_mean;
  double g2 = zero[2].N_mean - zero[1].N_mean;
  CHECK(g2 > 0.6 * g1);
  CHECK(zero[1].vacuum_overlap < zero[0].vacuum_overlap);
  CHECK(zero[2].vacuum_overlap < zero[1].vacuum_overlap);
  CHECK(zero[2].N_mean > zero[0].N_mean);
}

TEST_CASE("ground energy is variationally monotone in the occupation cutoff") {
  auto grid = ModeGrid::build(0.3, 4.0, 3, 2);
  auto ff = FormFactor::make(6.0, 1.0);  // strong coupling: visible truncation error
  auto ir = InfraredProfile::make(IrVariant::Unit);
  double prev = 1e30;
  for (int n_max : {1, 2, 3, 4}) {
    auto basis = FockBasis::make_static(grid, n_max, Vec3(0.4, 0, 0));
    auto res = ground_state(build_hamiltonian(basis, ff, ir), basis);
    CHECK(res.E0 <= prev + 1e-12);
    prev = res.E0;
  }
}

TEST_CASE("matrix-free application matches the sparse matrix") {
  auto grid = ModeGrid::build(0.4, 4.0, 3, 2);
  auto ff = FormFactor::make(1.5, 1.0);
  auto ir = InfraredProfile::make(IrVariant::GaussianBump, 1.2);
  auto V = ConfiningPotential::power(1.0, 2.0);
  auto basis = FockBasis::make_grid1d(grid, 2, 9, 0.5);
  auto H = build_hamiltonian(basis, ff, ir, &V);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(basis.size());
  for (long i = 0; i < basis.size(); ++i) x[i] = g(rng);
  Eigen::VectorXd y1 = H.mat * x;
  Eigen::VectorXd y2 = apply_hamiltonian(basis, ff, ir, &V, x);
  CHECK((y1 - y2).lpNorm<Eigen::Infinity>() < 1e-12 * y1.lpNorm<Eigen::Infinity>());
}

TEST_CASE("radial basis at zero charge matches the particle solver discretization") {
  auto V = ConfiningPotential::power(1.0, 2.0);
  const double R_max = 6.0;
  const int n_grid = 1000;
  auto gs = solve_ground_state(V, R_max, n_grid);

  auto grid = ModeGrid::build(0.5, 2.0, 1, 2);
  auto ff = FormFactor::make(0.0, 1.0);
  auto ir = InfraredProfile::make(IrVariant::Unit);
  auto basis = FockBasis::make_radial(grid, 0, n_grid - 1, R_max);
  auto res = ground_state(build_hamiltonian(basis, ff, ir, &V), basis, &V);
  CHECK(res.vacuum_overlap == doctest::Approx(1.0).epsilon(1e-9));

  // same finite-difference matrix, so expectations agree to solver tolerance
  auto R2 = transform_observable(basis, ff, ir, Observable::ParticleR2);
  double r2_fock = res.ground_vector.dot(R2.mat * res.ground_vector);
  double num = 0.0, den = 0.0;
  for (int i = 1; i < n_grid; ++i) {
    num += gs.r[i] * gs.r[i] * gs.u[i] * gs.u[i];
    den += gs.u[i] * gs.u[i];
  }
  CHECK(r2_fock == doctest::Approx(num / den).epsilon(1e-6));

  auto I = transform_observable(basis, ff, ir, Observable::Identity);
  CHECK(res.ground_vector.dot(I.mat * res.ground_vector) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("field quadrature expectation equals the classical minimizer mode value") {
  auto grid = ModeGrid::build(0.8, 2.5, 1, 2);
  auto ff = FormFactor::make(0.5, 1.0);
  double k = grid.modes[0].k.norm();
  double expected = -ff.rho_hat(k) / (k * k);  // h-independent at q = 0
  for (auto v : {IrVariant::Zero, IrVariant::Unit}) {
    auto ir = InfraredProfile::make(v);
    auto basis = FockBasis::make_static(grid, 10, Vec3::Zero());
    auto res = ground_state(build_hamiltonian(basis, ff, ir), basis);
    auto X = transform_observable(basis, ff, ir, Observable::FieldQuadrature, 0);
    double val = res.ground_vector.dot(X.mat * res.ground_vector);
    CHECK(val == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("oversized bases are rejected with a clear error") {
  auto grid = ModeGrid::build(0.1, 8.0, 16, 6);  // 96 modes
  CHECK_THROWS_AS(FockBasis::make_static(grid, 4, Vec3::Zero()), ValidationError);
  CHECK_NOTHROW(FockBasis::make_static(grid, 2, Vec3::Zero()));
}

TEST_SUITE_END();
