#include <doctest.h>

#include <cmath>
#include <random>

#include "core/model.hpp"

using namespace nelson;

TEST_SUITE_BEGIN("model");

TEST_CASE("gaussian form factor normalization") {
  auto ff = FormFactor::make(1.0, 1.0);
  CHECK(ff.rho_hat(0.0) == doctest::Approx(1.0 / std::pow(2.0 * M_PI, 3)).epsilon(1e-12));

  auto ff0 = FormFactor::make(0.0, 1.0);
  for (double k : {0.0, 0.5, 2.0, 7.0}) CHECK(ff0.rho_hat(k) == 0.0);

  auto ff2 = FormFactor::make(1.0, 2.0);
  CHECK(ff2.rho_hat(2.0) / ff2.rho_hat(0.0) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));

  CHECK_THROWS_AS(FormFactor::make(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(FormFactor::make(1.0, -2.0), ValidationError);
}

TEST_CASE("form factor rapid decrease on grid") {
  auto ff = FormFactor::make(1.0, 1.3);
  auto grid = ModeGrid::build(0.05, 10.0, 24, 6);
  for (const auto& m : grid.modes) {
    double k = m.k.norm();
    double bound = std::abs(ff.rho_hat(k)) * std::exp(k * k / (8.0 * ff.uv_width * ff.uv_width));
    CHECK(bound <= std::abs(ff.rho_hat(0.0)) * 1.0001);
  }
}

TEST_CASE("infrared profiles") {
  auto unit = InfraredProfile::make(IrVariant::Unit);
  for (double k : {0.0, 0.3, 2.0, 9.0}) CHECK(unit.h_hat(k) == 1.0);

  auto zero = InfraredProfile::make(IrVariant::Zero);
  CHECK(zero.h_hat(0.0) == 0.0);
  CHECK(zero.sup() == 0.0);

  auto bump = InfraredProfile::make(IrVariant::GaussianBump, 1.0);
  CHECK(bump.h_hat(0.0) == 1.0);
  CHECK(bump.h_hat(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(InfraredProfile::make(IrVariant::GaussianBump, -1.0), ValidationError);
}

TEST_CASE("confining potential asymptotics") {
  auto v = ConfiningPotential::power(1.0, 2.0);
  double r = 30.0;
  CHECK(std::abs(v(r) - v.C * std::pow(r, 2 * v.s)) / std::pow(r, 2 * v.s) < 1e-12);
  CHECK(std::isfinite(v.min_value()));
  CHECK_THROWS_AS(ConfiningPotential::power(-1.0, 2.0), ValidationError);
  CHECK_THROWS_AS(ConfiningPotential::power(1.0, 0.5), ValidationError);

  auto h = ConfiningPotential::harmonic();
  CHECK(h(2.0) == doctest::Approx(2.0));
}

TEST_CASE("mode grid construction and antipodal closure") {
  auto g = ModeGrid::build(0.1, 8.0, 16, 6);
  CHECK(g.size() == 96);
  for (int m = 0; m < g.size(); ++m) {
    int a = g.antipode[m];
    CHECK((g.modes[m].k + g.modes[a].k).norm() < 1e-14);
    CHECK(g.modes[m].w == doctest::Approx(g.modes[a].w).epsilon(1e-14));
    CHECK(g.modes[m].w > 0.0);
  }
  CHECK_THROWS_AS(ModeGrid::build(0.0, 8.0, 16, 6), ValidationError);
}

TEST_CASE("mode grid quadrature exactness vs adaptive radial quadrature") {
  auto ff = FormFactor::make(1.0, 1.0);
  auto g = ModeGrid::build(0.1, 8.0, 16, 6);
  double grid_sum = 0.0;
  for (const auto& m : g.modes) {
    double rh = ff.rho_hat(m.k.norm());
    grid_sum += m.w * rh * rh;
  }
  double exact = 4.0 * M_PI * integrate(
                                  [&](double k) {
                                    double rh = ff.rho_hat(k);
                                    return k * k * rh * rh;
                                  },
                                  0.1, 8.0);
  CHECK(std::abs(grid_sum - exact) / exact < 1e-3);
}

TEST_CASE("mode grid refinement under halved k_min") {
  auto ff = FormFactor::make(1.0, 1.0);
  auto sum_sq = [&](const ModeGrid& g) {
    double s = 0.0;
    for (const auto& m : g.modes) {
      double rh = ff.rho_hat(m.k.norm());
      s += m.w * rh * rh;
    }
    return s;
  };
  auto coarse = ModeGrid::build(0.1, 8.0, 16, 6);
  auto fine = ModeGrid::build(0.05, 8.0, 20, 6);
  double i_coarse = 4.0 * M_PI * integrate(
                                     [&](double k) {
                                       double rh = ff.rho_hat(k);
                                       return k * k * rh * rh;
                                     },
                                     0.1, 8.0);
  double i_fine = 4.0 * M_PI * integrate(
                                   [&](double k) {
                                     double rh = ff.rho_hat(k);
                                     return k * k * rh * rh;
                                   },
                                   0.05, 8.0);
  CHECK(std::abs(sum_sq(coarse) - i_coarse) / i_coarse < 1e-3);
  CHECK(std::abs(sum_sq(fine) - i_fine) / i_fine < 1e-3);
}

TEST_CASE("time grid") {
  auto tg = TimeGrid::make(4.0, 0.25);
  CHECK(tg.size() == 33);
  CHECK(tg.nodes.front() == doctest::Approx(-4.0));
  CHECK(tg.nodes.back() == doctest::Approx(4.0));
  for (int i = 0; i < tg.size(); ++i)
    CHECK(tg.nodes[i] == doctest::Approx(-tg.nodes[tg.size() - 1 - i]).epsilon(1e-14));
  CHECK((tg.size() - 1) * tg.dt == doctest::Approx(2.0 * tg.T));
  double wsum = 0.0;
  for (double w : tg.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0 * tg.T));
  CHECK_THROWS_AS(TimeGrid::make(-1.0, 0.25), ValidationError);
}

TEST_CASE("fourier round trip for a gaussian") {
  // fhat(k) = e^{-k^2}  =>  f(r) = pi^{3/2} e^{-r^2/4}, and transforming f
  // back must reproduce fhat to quadrature tolerance.
  auto fhat = [](double k) { return std::exp(-k * k); };
  for (double r : {0.0, 0.7, 1.9}) {
    double f = radial_fourier(fhat, r, 12.0);
    CHECK(f == doctest::Approx(std::pow(M_PI, 1.5) * std::exp(-r * r / 4.0)).epsilon(1e-9));
  }
  auto f_pos = [&](double r) { return std::pow(M_PI, 1.5) * std::exp(-r * r / 4.0); };
  for (double k : {0.3, 1.1}) {
    double back = std::pow(2.0 * M_PI, -3) * 4.0 * M_PI / k *
                  integrate([&](double r) { return r * f_pos(r) * std::sin(k * r); }, 0.0, 30.0);
    CHECK(back == doctest::Approx(fhat(k)).epsilon(1e-9));
  }
}

TEST_CASE("property: random valid parameters pass invariants") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    auto ff = FormFactor::make(u(rng) - 1.5, u(rng));
    CHECK(ff.rho_hat(0.0) == doctest::Approx(ff.charge / std::pow(2 * M_PI, 3)).epsilon(1e-12));
    int n_dirs = 2 * (1 + static_cast<int>(u(rng)));
    auto g = ModeGrid::build(0.05 * u(rng), 4.0 + u(rng), 8 + rep % 5, n_dirs);
    for (int m = 0; m < g.size(); ++m)
      CHECK((g.modes[m].k + g.modes[g.antipode[m]].k).norm() < 1e-13);
  }
}

TEST_SUITE_END();
