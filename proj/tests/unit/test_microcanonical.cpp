#include <random>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "selforg/errors.hpp"
#include "selforg/microcanonical.hpp"

using namespace selforg;

namespace {

MDConfig md(double a1, double a2, int n, double eps) {
  MDConfig c;
  c.alpha = {a1, a2};
  c.n_atoms = n;
  c.energy_per_particle = eps;
  return c;
}

}  // namespace

TEST_CASE("initial state sits on the energy shell") {
  for (auto [a1, a2, eps] : {std::tuple{0.5, 0.5, 0.5}, std::tuple{0.2, 2.0, -0.4}, std::tuple{1.5, 0.4, 0.1}}) {
    const MDConfig c = md(a1, a2, 300, eps);
    const EnsembleState s = sample_microcanonical_init(c);
    CHECK(mean_field_energy(s, c.model()) / 300 == doctest::Approx(eps).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("ideal gas initial state") {
  const MDConfig c = md(0.0, 0.0, 500, 0.5);
  const EnsembleState s = sample_microcanonical_init(c);
  double k = 0.0;
  for (double p : s.p) k += 0.5 * p * p;
  CHECK(k / 500 == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(auxiliary_beta(c, 0.5) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("auxiliary temperature solves the canonical energy equation") {
  const MDConfig c = md(0.5, 2.0, 100, -0.3);
  const double b = auxiliary_beta(c, -0.3);
  const Couplings a{0.5 * b, 2.0 * b};
  const PhasePoint p = classify_phase(a, Thermo{b});
  CHECK(canonical_energy_per_particle(b, a, {p.global_min.y_1, p.global_min.y_2}) ==
        doctest::Approx(-0.3).epsilon(1e-6));
}

TEST_CASE("energy floor state is at rest") {
  MDConfig c = md(0.4, 0.9, 10, -1.3);
  CHECK(c.energy_floor() == doctest::Approx(-1.3));
  const EnsembleState s = sample_microcanonical_init(c);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.p[i] == 0.0);
    CHECK(s.q[i] == 0.0);
  }
  c.energy_per_particle = -1.31;
  CHECK_THROWS_AS(c.validate(), Infeasible);
}

TEST_CASE("force matches the pair-sum gradient") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 2.0 * oracle::kPi);
  for (int n : {1, 4, 12}) {
    std::vector<double> q(n);
    for (auto& x : q) x = u(gen);
    const EnsembleState s(q, std::vector<double>(n, 0.0));
    const EffectiveModel m = EffectiveModel::hamiltonian(0.7, 1.9, 1.0, n);
    std::vector<double> f;
    mean_field_force(s, m, f);
    const auto ref = oracle::pair_force(s.q, m.gamma_1, m.gamma_2);
    for (int i = 0; i < n; ++i) CHECK(std::abs(f[i] - ref[i]) <= 1e-12 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("free flight without coupling") {
  const EffectiveModel m = EffectiveModel::hamiltonian(0.0, 0.0, 1.0, 3);
  EnsembleState s({0.5, 3.0, 5.5}, {1.0, -2.0, 0.25});
  for (int i = 0; i < 10; ++i) step_md(s, m, 0.1);
  CHECK(s.q[0] == doctest::Approx(wrap_phase(0.5 + 0.5)).epsilon(1e-13));
  CHECK(s.q[1] == doctest::Approx(wrap_phase(3.0 - 1.0)).epsilon(1e-13));
  CHECK(s.p == std::vector<double>{1.0, -2.0, 0.25});
}

TEST_CASE("time reversal") {
  const MDConfig c = md(0.6, 1.4, 50, 0.2);
  const EffectiveModel m = c.model();
  EnsembleState s = sample_microcanonical_init(c);
  const EnsembleState s0 = s;
  for (int i = 0; i < 500; ++i) step_md(s, m, c.dt);
  for (double& p : s.p) p = -p;
  for (int i = 0; i < 500; ++i) step_md(s, m, c.dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(std::remainder(s.q[i] - s0.q[i], 2.0 * oracle::kPi)));
    worst = std::max(worst, std::abs(s.p[i] + s0.p[i]));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("energy drift over 1e5 steps") {
  MDConfig c = md(0.5, 1.5, 60, 0.1);
  c.n_steps = 100000;
  c.record_every = 100;
  CHECK(relative_energy_drift(run_md(c)) <= 1e-8);
}

TEST_CASE("ideal gas keeps kinetic temperature 2 epsilon") {
  for (double eps : {0.1, 0.75, 3.0}) {
    MDConfig c = md(0.0, 0.0, 100, eps);
    c.n_steps = 2000;
    c.record_every = 10;
    c.burn_in_records = 0;
    const CaloricPoint p = measure_md(c);
    CHECK(p.kinetic_temperature == doctest::Approx(2.0 * eps).epsilon(1e-12));
    CHECK(p.ok);
  }
}

TEST_CASE("caloric curve reports failures per point") {
  MDConfig c = md(0.5, 0.5, 40, 0.0);
  c.n_steps = 3000;
  const auto pts = caloric_curve({0.5, -5.0, 1.0}, c, 2);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].ok);
  CHECK_FALSE(pts[1].ok);
  CHECK_FALSE(pts[1].error.empty());
  CHECK(pts[2].ok);
  CHECK(pts[2].kinetic_temperature > pts[0].kinetic_temperature);
  const auto again = caloric_curve({0.5, -5.0, 1.0}, c, 1);
  CHECK(again[0].kinetic_temperature == pts[0].kinetic_temperature);
  CHECK(again[2].theta_2_avg == pts[2].theta_2_avg);
}

TEST_CASE("adaptive burn-in stays within half the record") {
  MDConfig c = md(0.5, 2.0, 100, -0.5);
  c.n_steps = 20000;
  const TrajectoryRecord r = run_md(c);
  const auto b = adaptive_burn_in(r);
  CHECK(b >= 0);
  CHECK(b <= static_cast<std::int64_t>(r.theta_2.size() / 2));
}

TEST_CASE("configuration validation") {
  MDConfig c = md(0.5, 0.5, 10, 0.5);
  c.dt = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = md(-0.5, 0.5, 10, 0.5);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = md(0.5, 0.5, 0, 0.5);
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
