// Randomized invariants. Each case draws its inputs from a fixed seed so a
// failure is reproducible.

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "selforg/equilibrium.hpp"
#include "selforg/langevin.hpp"
#include "selforg/microcanonical.hpp"
#include "selforg/model.hpp"

using namespace selforg;

TEST_CASE("fluctuation-dissipation holds for random stationary cavities") {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  int tested = 0;
  while (tested < 1000) {
    CavityParams c;
    c.kappa_1 = u(gen);
    c.kappa_2 = u(gen);
    c.delta_1 = -u(gen);
    c.s_1 = 0.2 * u(gen);
    c.s_2 = 0.2 * u(gen);
    c.n_atoms = 1 + static_cast<int>(gen() % 5000);
    const double r = c.delta_1 / (c.delta_1 * c.delta_1 + c.kappa_1 * c.kappa_1);
    if (2.0 * std::abs(r) * c.kappa_2 > 1.0) continue;
    c.delta_2 = oracle::matching_detuning(r, c.kappa_2, gen() % 2);
    const EffectiveModel m = map_cavity_to_effective(c);
    for (int n = 1; n <= 2; ++n) {
      CHECK(-m.mass * m.friction(n) / m.diffusion(n) == doctest::Approx(m.beta).epsilon(1e-12));
      CHECK(m.alpha_1 >= 0.0);
    }
    CHECK(m.beta > 0.0);
    ++tested;
  }
}

TEST_CASE("order parameters: translation by 2 pi, permutation, shift by pi") {
  std::mt19937_64 gen(102);
  std::uniform_real_distribution<double> u(0.0, 2.0 * oracle::kPi);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> q(1 + gen() % 40);
    for (auto& x : q) x = u(gen);
    const OrderPair a = order_parameters(q);
    auto shifted = q;
    for (auto& x : shifted) x += 2.0 * oracle::kPi;
    const OrderPair b = order_parameters(shifted);
    CHECK(b.theta_1 == doctest::Approx(a.theta_1).scale(1e-12));
    CHECK(b.theta_2 == doctest::Approx(a.theta_2).scale(1e-12));
    std::shuffle(shifted.begin(), shifted.end(), gen);
    CHECK(order_parameters(shifted).theta_2 == doctest::Approx(a.theta_2).scale(1e-12));
    for (auto& x : shifted) x += oracle::kPi;
    const OrderPair c = order_parameters(shifted);
    CHECK(c.theta_1 == doctest::Approx(-a.theta_1).scale(1e-12));
    CHECK(c.theta_2 == doctest::Approx(a.theta_2).scale(1e-12));
  }
}

TEST_CASE("energy and force equal the pair sums for N <= 12") {
  std::mt19937_64 gen(103);
  std::uniform_real_distribution<double> u(0.0, 2.0 * oracle::kPi), a(0.0, 3.0);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 12; ++n)
    for (int t = 0; t < 10; ++t) {
      std::vector<double> q(n), p(n);
      for (int i = 0; i < n; ++i) q[i] = u(gen), p[i] = g(gen);
      const EnsembleState s(q, p);
      const EffectiveModel m = EffectiveModel::hamiltonian(a(gen), a(gen), 0.5 + a(gen), n);
      const double ref_e = oracle::pair_energy(s.q, s.p, m.gamma_1, m.gamma_2);
      CHECK(std::abs(mean_field_energy(s, m) - ref_e) <= 1e-12 * std::max(1.0, std::abs(ref_e)));
      std::vector<double> f;
      mean_field_force(s, m, f);
      const auto ref = oracle::pair_force(s.q, m.gamma_1, m.gamma_2);
      for (int i = 0; i < n; ++i) CHECK(std::abs(f[i] - ref[i]) <= 1e-12 * std::max(1.0, std::abs(ref[i])));
    }
}

TEST_CASE("solver output is self-consistent on random couplings") {
  std::mt19937_64 gen(104);
  std::uniform_real_distribution<double> a(0.0, 2.5);
  for (int t = 0; t < 40; ++t) {
    const Couplings al{a(gen), a(gen)};
    for (const auto& f : solve_fixed_points(al, default_seeds())) {
      const auto r = self_consistency_residual(f.point(), al);
      CHECK(std::abs(r[0]) <= 1e-10);
      CHECK(std::abs(r[1]) <= 1e-10);
    }
  }
}

TEST_CASE("free energy is even in y_1 on random inputs") {
  std::mt19937_64 gen(105);
  std::uniform_real_distribution<double> y(-1.0, 1.0), a(0.0, 3.0), b(0.2, 4.0);
  for (int t = 0; t < 500; ++t) {
    const Couplings al{a(gen), a(gen)};
    const Point2 p{y(gen), y(gen)};
    const Thermo th{b(gen)};
    CHECK(std::abs(free_energy(p, al, th) - free_energy({-p.y1, p.y2}, al, th)) <= 1e-12);
  }
}

TEST_CASE("origin is a local minimum on the open unit square") {
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const Couplings al{(i + 0.5) / 50.0, (j + 0.5) / 50.0};
      CHECK(hessian_classify({0.0, 0.0}, al).stability == Stability::minimum);
    }
}

TEST_CASE("langevin step cost grows linearly with N") {
  // Least-squares exponent of time per step against N over four doublings;
  // 2.2x per doubling corresponds to an exponent of log2(2.2) = 1.14.
  auto seconds_per_step = [](int n) {
    LangevinConfig c;
    c.model = map_cavity_to_effective(EffectiveModel::cavity_for(0.5, 1.5, 1.0, n));
    c.n_atoms = n;
    c.init.beta_0 = 1.0;
    EnsembleState s = initial_state(c);
    const CounterRng rng(1);
    const int steps = 400000 / n + 20;
    double best = INFINITY;
    for (int rep = 0; rep < 9; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < steps; ++k) step_langevin(s, c, rng, k);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / steps);
    }
    return best;
  };
  std::vector<double> x, y;
  for (int n = 1000; n <= 16000; n *= 2) {
    x.push_back(std::log2(double(n)));
    y.push_back(std::log2(seconds_per_step(n)));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  const double exponent = sxy / sxx;
  MESSAGE("cost exponent " << exponent << ", " << std::exp2(exponent) << "x per doubling");
  CHECK(exponent <= std::log2(2.2));
}

TEST_CASE("microcanonical averages approach the canonical values as N grows") {
  // alpha = (0.5, 0.5): the kinetic temperature excess over 1/beta; alpha =
  // (0.2, 2.0): the Theta_2 offset from the Bessel root.
  const double root = oracle::nematic_root(2.0);
  std::vector<double> temp_gap, theta_gap;
  for (int n : {100, 400, 1600}) {
    MDConfig c;
    c.n_atoms = n;
    c.n_steps = 40000;
    c.record_every = 20;
    c.alpha = {0.5, 0.5};
    c.energy_per_particle = 0.5;
    temp_gap.push_back(std::abs(measure_md(c).kinetic_temperature - 1.0));
    c.alpha = {0.2, 2.0};
    c.energy_per_particle = canonical_energy_per_particle(1.0, c.alpha, {0.0, root});
    double gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      c.seed = seed;
      gap += measure_md(c).theta_2_avg - root;
    }
    theta_gap.push_back(std::abs(gap / 3.0));
    MESSAGE("N=" << n << " |T - 1/beta| = " << temp_gap.back() << " |Theta_2 - root| = " << theta_gap.back());
  }
  CHECK(temp_gap[1] < temp_gap[0]);
  CHECK(temp_gap[2] < temp_gap[1]);
  CHECK(theta_gap[2] < theta_gap[0]);
}
