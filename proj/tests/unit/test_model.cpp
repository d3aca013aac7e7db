#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "selforg/errors.hpp"
#include "selforg/model.hpp"

using namespace selforg;

namespace {

CavityParams symmetric(double kappa, double s, int n) {
  CavityParams c;
  c.delta_1 = c.delta_2 = -kappa;
  c.kappa_1 = c.kappa_2 = kappa;
  c.s_1 = c.s_2 = s;
  c.n_atoms = n;
  return c;
}

}  // namespace

TEST_CASE("stationarity condition") {
  CHECK(validate_stationarity_condition(symmetric(1.3, 0.1, 10)));

  CavityParams c = symmetric(1.0, 0.1, 10);
  c.delta_2 = +1.0;
  CHECK_FALSE(validate_stationarity_condition(c));

  // kappa_1 != kappa_2 with delta_2 solving the quadratic.
  c = symmetric(1.0, 0.1, 10);
  c.delta_1 = -0.7;
  c.kappa_1 = 1.1;
  c.kappa_2 = 0.4;
  const double r = c.delta_1 / (c.delta_1 * c.delta_1 + c.kappa_1 * c.kappa_1);
  for (bool far : {false, true}) {
    c.delta_2 = oracle::matching_detuning(r, c.kappa_2, far);
    CHECK(c.delta_2 < 0.0);
    CHECK(validate_stationarity_condition(c));
  }
  c.delta_2 *= 1.01;
  CHECK_FALSE(validate_stationarity_condition(c));
  CHECK_THROWS_AS(validate_stationarity_condition(c, -1.0), ValidationError);
}

TEST_CASE("parameter map at delta = -kappa") {
  const double kappa = 1.7, s = 0.05;
  const int n = 250;
  const EffectiveModel m = map_cavity_to_effective(symmetric(kappa, s, n));
  CHECK(m.alpha_1 == doctest::Approx(n * s * s / (kappa * kappa)).epsilon(1e-14));
  CHECK(m.alpha_2 == doctest::Approx(n * s * s / (kappa * kappa)).epsilon(1e-14));
  CHECK(m.beta == doctest::Approx(2.0 / kappa).epsilon(1e-14));
  CHECK(m.eta_1 == 0.0);
  CHECK(m.eta_2 == 0.0);
  CHECK(m.k1 == 0.5);
  CHECK(m.k2 == 1.0);
  CHECK(m.omega_r == 0.5);
}

TEST_CASE("inactive mode carries no coefficients") {
  CavityParams c = symmetric(1.0, 0.1, 50);
  c.s_1 = 0.0;
  c.delta_1 = +3.0;  // an unpumped mode does not constrain the temperature
  const EffectiveModel m = map_cavity_to_effective(c);
  CHECK(m.alpha_1 == 0.0);
  CHECK(m.d_1 == 0.0);
  CHECK(m.g_1 == 0.0);
  CHECK(m.eta_1 == 0.0);
  CHECK(m.beta == doctest::Approx(2.0));
}

TEST_CASE("parameter map against the coefficient formulas") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 200; ++t) {
    CavityParams c;
    c.kappa_1 = u(gen);
    c.kappa_2 = u(gen);
    c.delta_1 = -u(gen);
    c.s_1 = 0.1 * u(gen);
    c.s_2 = 0.1 * u(gen);
    c.n_atoms = 1 + static_cast<int>(gen() % 1000);
    c.hbar = 0.5 + 0.5 * u(gen);
    c.mass = 0.5 + 0.5 * u(gen);
    c.k = 0.5 + u(gen);
    const double r = c.delta_1 / (c.delta_1 * c.delta_1 + c.kappa_1 * c.kappa_1);
    if (2.0 * std::abs(r) * c.kappa_2 > 1.0) continue;
    c.delta_2 = oracle::matching_detuning(r, c.kappa_2, t % 2 == 0);
    const EffectiveModel m = map_cavity_to_effective(c);
    for (int n = 1; n <= 2; ++n) {
      const double d = c.delta(n), kap = c.kappa(n), s2 = c.s(n) * c.s(n), lor = d * d + kap * kap;
      const double kn = n == 1 ? 0.5 * c.k : c.k;
      CHECK(m.diffusion(n) == doctest::Approx(c.hbar * c.hbar * kn * kn * s2 * kap / lor).epsilon(1e-13));
      CHECK(m.friction(n) == doctest::Approx(c.hbar * kn * kn / c.mass * s2 * 4 * d * kap / (lor * lor)).epsilon(1e-13));
      CHECK(m.eta(n) ==
            doctest::Approx(c.hbar * c.hbar * kn * kn / c.mass * s2 * (kap * kap - d * d) / (lor * lor)).epsilon(1e-12));
      CHECK(m.gamma(n) * m.beta == doctest::Approx(4.0 * c.n_atoms * s2 * d * d / (lor * lor)).epsilon(1e-13));
    }
  }
}

TEST_CASE("eta changes sign at |delta| = kappa") {
  CavityParams c = symmetric(1.0, 0.1, 10);
  c.s_2 = 0.0;
  c.delta_1 = -0.9;
  CHECK(map_cavity_to_effective(c).eta_1 > 0.0);
  c.delta_1 = -1.1;
  CHECK(map_cavity_to_effective(c).eta_1 < 0.0);
  c.delta_1 = -1.0;
  CHECK(map_cavity_to_effective(c).eta_1 == 0.0);
}

TEST_CASE("parameter map rejects unstable and invalid inputs") {
  CavityParams c = symmetric(1.0, 0.1, 10);
  c.delta_2 = 0.5;
  CHECK_THROWS_AS(map_cavity_to_effective(c), StationarityViolation);
  c = symmetric(1.0, 0.1, 10);
  c.delta_2 = -0.5;
  CHECK_THROWS_AS(map_cavity_to_effective(c), StationarityViolation);
  c = symmetric(1.0, 0.1, 10);
  c.kappa_1 = 0.0;
  CHECK_THROWS_AS(map_cavity_to_effective(c), ValidationError);
  c = symmetric(1.0, 0.1, 0);
  CHECK_THROWS_AS(map_cavity_to_effective(c), ValidationError);
  c = symmetric(1.0, 0.1, 10);
  c.phi = 0.5;
  CHECK_THROWS_AS(map_cavity_to_effective(c), ValidationError);
}

TEST_CASE("cavity_for realizes the requested couplings") {
  const CavityParams c = EffectiveModel::cavity_for(0.3, 1.7, 2.5, 80);
  const EffectiveModel m = map_cavity_to_effective(c);
  CHECK(m.alpha_1 == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(m.alpha_2 == doctest::Approx(1.7).epsilon(1e-13));
  CHECK(m.beta == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(m.eta_1 == 0.0);
  CHECK(m.eta_2 == 0.0);
}

TEST_CASE("semiclassical parameter") {
  CavityParams c = symmetric(1.0, 0.1, 10);
  auto [e1, e2] = semiclassical_epsilon(c, 1.0);
  CHECK(e1 == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(e2 == doctest::Approx(1.0 / std::sqrt(2.0)));
  c.delta_1 = c.delta_2 = -2.0;
  c.kappa_1 = c.kappa_2 = 2.0;
  CHECK(semiclassical_epsilon(c, 1.0).first == doctest::Approx(e1 / 2.0));
  CHECK_THROWS_AS(semiclassical_epsilon(c, 0.0), ValidationError);
}

TEST_CASE("order parameters of reference configurations") {
  const OrderPair a = order_parameters(std::vector<double>(8, 0.0));
  CHECK(a.theta_1 == doctest::Approx(1.0));
  CHECK(a.theta_2 == doctest::Approx(1.0));

  std::vector<double> alt;
  for (int i = 0; i < 10; ++i) alt.push_back(i % 2 ? oracle::kPi : 0.0);
  const OrderPair b = order_parameters(alt);
  CHECK(b.theta_1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.theta_2 == doctest::Approx(1.0));

  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(2.0 * oracle::kPi * i / 64);
  const OrderPair c = order_parameters(grid);
  CHECK(std::abs(c.theta_1) < 1e-14);
  CHECK(std::abs(c.theta_2) < 1e-14);
  CHECK(order_parameters(std::vector<double>{}) == OrderPair{});
}

TEST_CASE("state wraps phases") {
  const EnsembleState s({-0.5, 7.0, 2.0 * oracle::kPi}, {0.0, 0.0, 0.0});
  CHECK(s.q[0] == doctest::Approx(2.0 * oracle::kPi - 0.5));
  CHECK(s.q[1] == doctest::Approx(7.0 - 2.0 * oracle::kPi));
  CHECK(s.q[2] == 0.0);
  for (double q : s.q) CHECK((q >= 0.0 && q < 2.0 * oracle::kPi));
  CHECK_THROWS_AS(EnsembleState({0.0}, {}), ValidationError);
}

TEST_CASE("mean-field energy") {
  const EffectiveModel m = EffectiveModel::hamiltonian(0.7, 1.3, 1.0, 6);
  const EnsembleState zero(std::vector<double>(6, 0.0), std::vector<double>(6, 0.0));
  CHECK(mean_field_energy(zero, m) == doctest::Approx(-6.0 * (0.7 + 1.3)));

  std::vector<double> grid;
  for (int i = 0; i < 6; ++i) grid.push_back(2.0 * oracle::kPi * i / 6);
  CHECK(std::abs(mean_field_energy(EnsembleState(grid, std::vector<double>(6, 0.0)), m)) < 1e-13);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * oracle::kPi);
  std::normal_distribution<double> g;
  std::vector<double> q(6), p(6);
  for (int i = 0; i < 6; ++i) q[i] = u(gen), p[i] = g(gen);
  const EnsembleState s(q, p);
  CHECK(mean_field_energy(s, m) == doctest::Approx(oracle::pair_energy(s.q, s.p, 0.7, 1.3)).epsilon(1e-12));
}

TEST_CASE("cavity field amplitudes") {
  const CavityParams c = symmetric(1.0, 0.1, 100);
  const EffectiveModel m = map_cavity_to_effective(c);
  const CavityFields zero = cavity_field_amplitudes(m, c, {0.0, 0.0});
  CHECK(std::abs(zero.e_1) == 0.0);
  CHECK(std::abs(zero.e_2) == 0.0);
  const CavityFields one = cavity_field_amplitudes(m, c, {1.0, 1.0});
  CHECK(std::norm(one.e_1) == doctest::Approx(100.0 * 100.0 * 0.01 / 2.0));
  const CavityFields flipped = cavity_field_amplitudes(m, c, {-1.0, 1.0});
  CHECK(flipped.e_1 == -one.e_1);
  CHECK(std::abs(flipped.e_1) == doctest::Approx(std::abs(one.e_1)));
}

TEST_CASE("GHMF translation") {
  const GhmfMapping g = ghmf_mapping(0.3, 0.9);
  CHECK(g.delta == doctest::Approx(0.25));
  CHECK(g.reduced_temperature == doctest::Approx(1.0 / 1.2));
  CHECK(g.ambiguous);
}
