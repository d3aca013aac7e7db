#include "selforg/microcanonical.hpp"

#include <algorithm>
#include <cmath>

#include "selforg/errors.hpp"
#include "selforg/parallel.hpp"
#include "selforg/sampling.hpp"
#include "selforg/stats.hpp"

namespace selforg {

namespace {

constexpr std::uint64_t kInitStreamBase = 16;
constexpr int kMaxRedraws = 20;

double canonical_energy_at(const MDConfig& cfg, double b) {
  const Couplings a{cfg.alpha.alpha_1 / cfg.beta_ref * b, cfg.alpha.alpha_2 / cfg.beta_ref * b};
  const PhasePoint pp = classify_phase(a, Thermo{b});
  return canonical_energy_per_particle(b, a, {pp.global_min.y_1, pp.global_min.y_2});
}

}  // namespace

void MDConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (record_every < 1) throw ValidationError("record_every must be at least 1");
  if (n_atoms < 1) throw ValidationError("n_atoms must be at least 1");
  if (!(beta_ref > 0.0)) throw ValidationError("beta_ref must be positive");
  if (!(alpha.alpha_1 >= 0.0) || !(alpha.alpha_2 >= 0.0)) throw ValidationError("alpha_n must be non-negative");
  if (!std::isfinite(energy_per_particle)) throw ValidationError("energy_per_particle must be finite");
  if (!(momentum_bound > 0.0)) throw ValidationError("momentum_bound must be positive");
  const double floor = energy_floor();
  if (energy_per_particle < floor - 1e-12 * std::max(1.0, std::abs(floor)))
    throw Infeasible("energy per particle lies below the potential floor " + std::to_string(floor));
}

double auxiliary_beta(const MDConfig& cfg, double epsilon) {
  // The canonical energy decreases with b from +inf towards the floor. The
  // auxiliary temperature only shapes the initial draw, so 1e-8 relative
  // accuracy is plenty.
  double lo = 1.0, hi = 1.0;
  if (canonical_energy_at(cfg, 1.0) > epsilon) {
    while (canonical_energy_at(cfg, hi) > epsilon) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) return hi;
    }
  } else {
    while (canonical_energy_at(cfg, lo) <= epsilon) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-12) return lo;
    }
  }
  while (hi / lo - 1.0 > 1e-8) {
    const double mid = std::sqrt(lo * hi);
    (canonical_energy_at(cfg, mid) > epsilon ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

EnsembleState sample_microcanonical_init(const MDConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_atoms);
  const EffectiveModel model = cfg.model();
  const double eps = cfg.energy_per_particle;
  const double floor = cfg.energy_floor();
  const double tol = 1e-12 * std::max(1.0, std::abs(eps));

  if (eps <= floor + tol) return EnsembleState(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));

  const CounterRng rng(cfg.seed);
  double b = auxiliary_beta(cfg, eps);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt, b *= 2.0) {
    const Couplings a{model.gamma_1 * b, model.gamma_2 * b};
    const PhasePoint pp = classify_phase(a, Thermo{b});
    const MeanFieldDensity rho(a, {pp.global_min.y_1, pp.global_min.y_2});
    const std::uint64_t stream = kInitStreamBase + 2 * static_cast<std::uint64_t>(attempt);
    EnsembleState s(rho.sample(n, rng, stream), std::vector<double>(n));
    const double sd = std::sqrt(model.mass / b);
    for (std::size_t i = 0; i < n; ++i) s.p[i] = sd * rng.normal(stream + 1, i);

    const double potential = mean_field_energy(s, model) - kinetic_energy(s, model.mass);
    const double target = static_cast<double>(n) * eps - potential;
    if (target < 0.0) continue;  // positions too disordered for this energy
    const double current = kinetic_energy(s, model.mass);
    if (!(current > 0.0)) throw RescaleFailure("drawn momenta carry no kinetic energy");
    const double scale = std::sqrt(target / current);
    for (double& p : s.p) p *= scale;
    const double achieved = mean_field_energy(s, model) / static_cast<double>(n);
    if (std::abs(achieved - eps) > tol)
      throw RescaleFailure("rescaled energy misses the target by " + std::to_string(achieved - eps));
    return s;
  }
  throw RescaleFailure("no position draw left room for non-negative kinetic energy");
}

void step_md(EnsembleState& state, const EffectiveModel& model, double dt, Integrator scheme, double momentum_bound,
             std::int64_t step) {
  symplectic_step(state, model, dt, scheme);
  state.t += dt;
  for (double p : state.p)
    if (!std::isfinite(p) || std::abs(p) > momentum_bound)
      throw NumericalBlowup("momentum exceeded bound " + std::to_string(momentum_bound), step);
}

TrajectoryRecord run_md(const MDConfig& cfg) {
  cfg.validate();
  const EffectiveModel model = cfg.model();
  TrajectoryRecord rec;
  rec.mass = model.mass;
  const double scale = std::sqrt(model.mass * std::max(2.0 * std::abs(cfg.energy_per_particle), 1e-3));
  rec.momentum_histogram.lo = -6.0 * scale;
  rec.momentum_histogram.hi = 6.0 * scale;
  rec.momentum_histogram.counts.assign(120, 0);

  EnsembleState state = sample_microcanonical_init(cfg);
  const std::int64_t fixed_burn = cfg.burn_in_records;
  std::int64_t taken = 0;
  auto record = [&] {
    append_record(rec, state, model, fixed_burn >= 0 && taken < fixed_burn);
    ++taken;
  };
  record();
  for (std::int64_t step = 0; step < cfg.n_steps; ++step) {
    step_md(state, model, cfg.dt, cfg.integrator, cfg.momentum_bound, step);
    if ((step + 1) % cfg.record_every == 0) record();
  }
  if (fixed_burn < 0) rec.burn_in_records = adaptive_burn_in(rec);
  rec.checksum = state_checksum(state);
  rec.final_state = std::move(state);
  return rec;
}

double relative_energy_drift(const TrajectoryRecord& rec) {
  if (rec.energy.empty()) return 0.0;
  const double e0 = rec.energy.front();
  const double k0 = rec.momentum_sums.front().s2 / (2.0 * rec.mass);
  const double scale = std::max(std::abs(e0), k0);
  double worst = 0.0;
  for (double e : rec.energy) worst = std::max(worst, std::abs(e - e0));
  return scale > 0.0 ? worst / scale : worst;
}

std::int64_t adaptive_burn_in(const TrajectoryRecord& rec) {
  const auto n = static_cast<std::int64_t>(rec.theta_2.size());
  if (n < 4) return 0;
  std::int64_t burn = 0;
  for (int it = 0; it < 10; ++it) {
    const std::span<const double> rest(rec.theta_2.data() + burn, static_cast<std::size_t>(n - burn));
    const auto next =
        std::min<std::int64_t>(n / 2, static_cast<std::int64_t>(std::ceil(20.0 * integrated_autocorrelation_time(rest))));
    if (next == burn) break;
    burn = next;
  }
  return burn;
}

CaloricPoint measure_md(const MDConfig& cfg) {
  CaloricPoint pt;
  pt.epsilon = cfg.energy_per_particle;
  const TrajectoryRecord rec = run_md(cfg);
  pt.energy_drift = relative_energy_drift(rec);
  pt.burn_in_records = rec.burn_in_records;
  const auto start = static_cast<std::size_t>(rec.burn_in_records);
  const std::size_t count = rec.theta_2.size() - start;
  pt.samples = count;
  auto tail = [&](const std::vector<double>& v) { return std::span<const double>(v.data() + start, count); };
  const BlockingResult t = blocking_standard_error(tail(rec.kinetic_temperature));
  const BlockingResult b1 = blocking_standard_error(tail(rec.theta_1));
  const BlockingResult b2 = blocking_standard_error(tail(rec.theta_2));
  pt.kinetic_temperature = t.mean;
  pt.kinetic_temperature_se = t.standard_error;
  pt.theta_1_avg = b1.mean;
  pt.theta_1_se = b1.standard_error;
  pt.theta_2_avg = b2.mean;
  pt.theta_2_se = b2.standard_error;
  return pt;
}

std::vector<CaloricPoint> caloric_curve(const std::vector<double>& epsilons, const MDConfig& cfg, int workers) {
  std::vector<CaloricPoint> out(epsilons.size());
  parallel_for(epsilons.size(), workers, [&](std::size_t i) {
    MDConfig c = cfg;
    c.energy_per_particle = epsilons[i];
    try {
      out[i] = measure_md(c);
    } catch (const std::exception& e) {
      out[i] = CaloricPoint{};
      out[i].epsilon = epsilons[i];
      out[i].ok = false;
      out[i].error = e.what();
    }
  });
  return out;
}

EnsembleComparison ensemble_compare(Couplings alpha, double beta, const MDConfig& config) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  EnsembleComparison r;
  r.alpha = alpha;
  r.beta = beta;
  r.canonical = classify_phase(alpha, Thermo{beta});
  const OrderPair theta{r.canonical.global_min.y_1, r.canonical.global_min.y_2};
  r.epsilon = canonical_energy_per_particle(beta, alpha, theta);

  MDConfig c = config;
  c.alpha = alpha;
  c.beta_ref = beta;
  c.energy_per_particle = r.epsilon;
  r.micro = measure_md(c);

  auto sigma = [](double diff, double se) { return se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : INFINITY); };
  const double d1 = r.micro.theta_1_avg - theta.theta_1;
  const double d2 = r.micro.theta_2_avg - theta.theta_2;
  r.sigma_1 = sigma(d1, r.micro.theta_1_se);
  r.sigma_2 = sigma(d2, r.micro.theta_2_se);
  r.temperature_sigma = sigma(r.micro.kinetic_temperature - 1.0 / beta, r.micro.kinetic_temperature_se);
  const bool off_1 = r.sigma_1 > kDisagreeSigma && std::abs(d1) > kDisagreeMinimum;
  const bool off_2 = r.sigma_2 > kDisagreeSigma && std::abs(d2) > kDisagreeMinimum;
  r.agree = !(off_1 || off_2);
  return r;
}

}  // namespace selforg
