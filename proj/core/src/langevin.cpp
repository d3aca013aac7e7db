#include "selforg/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "selforg/equilibrium.hpp"
#include "selforg/errors.hpp"
#include "selforg/sampling.hpp"

namespace selforg {

namespace {

constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kPositionStream = 2;
constexpr std::uint64_t kMomentumStream = 3;

struct Harmonics {
  std::vector<double> s1, c1, s2, c2;

  void compute(const std::vector<double>& q) {
    const std::size_t n = q.size();
    s1.resize(n);
    c1.resize(n);
    s2.resize(n);
    c2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::sin(q[i]);
      const double c = std::cos(q[i]);
      s1[i] = s;
      c1[i] = c;
      s2[i] = 2.0 * s * c;
      c2[i] = c * c - s * s;
    }
  }
  const std::vector<double>& sin_n(int mode) const { return mode == 1 ? s1 : s2; }
  const std::vector<double>& cos_n(int mode) const { return mode == 1 ? c1 : c2; }
};

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void force_from(const Harmonics& h, const EffectiveModel& m, std::vector<double>& force) {
  const double n = static_cast<double>(h.c1.size());
  const double a1 = -2.0 * m.gamma_1 * m.k1 * sum(h.c1) / n;
  const double a2 = -2.0 * m.gamma_2 * m.k2 * sum(h.c2) / n;
  force.resize(h.s1.size());
  for (std::size_t i = 0; i < force.size(); ++i) force[i] = a1 * h.s1[i] + a2 * h.s2[i];
}

void add_eta_from(const Harmonics& h, const EffectiveModel& m, std::vector<double>& drift) {
  for (int mode = 1; mode <= 2; ++mode) {
    const double eta = m.eta(mode);
    if (eta == 0.0) continue;
    const auto& s = h.sin_n(mode);
    const auto& c = h.cos_n(mode);
    const double total = sum(c);
    const double scale = eta * m.wavenumber(mode);
    for (std::size_t j = 0; j < drift.size(); ++j) drift[j] += scale * s[j] * (total + c[j]);
  }
}

// expm1(z) / z with the removable singularity filled in.
double phi(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

// Exact update of the collective damping and noise of one mode over h.
void collective_ou(std::vector<double>& p, const std::vector<double>& s, double friction, double diffusion, double h,
                   double xi) {
  double big_s = 0.0, u = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    big_s += s[i] * s[i];
    u += s[i] * p[i];
  }
  if (big_s == 0.0) return;
  const double rate = friction * big_s;
  const double var = 2.0 * diffusion * big_s * big_s * h * phi(2.0 * rate * h);
  const double u_new = std::exp(rate * h) * u + std::sqrt(std::max(var, 0.0)) * xi;
  const double shift = (u_new - u) / big_s;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += s[i] * shift;
}

void dissipate(EnsembleState& state, const LangevinConfig& cfg, const Harmonics& h, const CounterRng& rng,
               std::int64_t step, int half) {
  const auto xi = rng.normals(kNoiseStream, static_cast<std::uint64_t>(step) * 2 + half);
  const double dt = 0.5 * cfg.dt;
  for (int mode = 1; mode <= 2; ++mode) {
    const double g = cfg.model.friction(mode);
    const double d = cfg.model.diffusion(mode);
    if (g == 0.0 && d == 0.0) continue;
    collective_ou(state.p, h.sin_n(mode), g, d, dt, xi[mode - 1]);
  }
}

void check_bound(const EnsembleState& state, double bound, std::int64_t step) {
  for (double p : state.p)
    if (!std::isfinite(p) || std::abs(p) > bound)
      throw NumericalBlowup("momentum exceeded bound " + std::to_string(bound), step);
}

}  // namespace

const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::cold_uniform: return "cold_uniform";
    case InitKind::cold_nematic: return "cold_nematic";
    case InitKind::thermal: return "thermal";
    case InitKind::canonical: return "canonical";
    case InitKind::explicit_state: return "explicit";
  }
  return "?";
}

InitKind init_kind_from_string(const std::string& s) {
  if (s == "cold_uniform") return InitKind::cold_uniform;
  if (s == "cold_nematic") return InitKind::cold_nematic;
  if (s == "thermal") return InitKind::thermal;
  if (s == "canonical") return InitKind::canonical;
  if (s == "explicit") return InitKind::explicit_state;
  throw ValidationError("unknown init kind '" + s + "'");
}

void Histogram::add(double x) {
  if (!(x >= lo) || !(x < hi) || counts.empty()) return;
  auto b = static_cast<std::size_t>((x - lo) / bin_width());
  if (b >= counts.size()) b = counts.size() - 1;
  ++counts[b];
}

std::vector<std::string> LangevinConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (record_every < 1) throw ValidationError("record_every must be at least 1");
  if (burn_in_steps < 0) throw ValidationError("burn_in_steps must be non-negative");
  if (n_atoms < 1) throw ValidationError("n_atoms must be at least 1");
  if (model.n_atoms != n_atoms) throw ValidationError("model.n_atoms must equal n_atoms");
  if (!(model.beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(model.mass > 0.0)) throw ValidationError("mass must be positive");
  if (model.g_1 > 0.0 || model.g_2 > 0.0) throw ValidationError("friction Gamma_n must be non-positive");
  if (model.d_1 < 0.0 || model.d_2 < 0.0) throw ValidationError("diffusion D_n must be non-negative");
  if (!(momentum_bound > 0.0)) throw ValidationError("momentum_bound must be positive");
  if (histogram_bins < 1 || !(histogram_range > 0.0)) throw ValidationError("histogram needs bins and a range");
  if (!(init.beta_0 >= 0.0)) throw ValidationError("init beta_0 must be non-negative");
  if ((init.kind == InitKind::thermal || init.kind == InitKind::canonical) && !(init.beta_0 > 0.0))
    throw ValidationError(std::string(to_string(init.kind)) + " init needs beta_0 > 0");
  if (init.kind == InitKind::explicit_state &&
      (init.state.q.size() != static_cast<std::size_t>(n_atoms) || init.state.p.size() != init.state.q.size()))
    throw ValidationError("explicit initial state must have n_atoms positions and momenta");

  std::vector<std::string> warnings;
  const double rate = dt * std::max(std::abs(model.g_1), std::abs(model.g_2)) * n_atoms;
  if (rate > 0.1) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dt*|Gamma|*N = %.3g exceeds 0.1; collective damping is under-resolved", rate);
    warnings.emplace_back(buf);
  }
  return warnings;
}

void mean_field_force(const EnsembleState& state, const EffectiveModel& model, std::vector<double>& force) {
  Harmonics h;
  h.compute(state.q);
  force_from(h, model, force);
}

void eta_drift(const EnsembleState& state, const EffectiveModel& model, std::vector<double>& drift) {
  Harmonics h;
  h.compute(state.q);
  drift.assign(state.size(), 0.0);
  add_eta_from(h, model, drift);
}

Drift langevin_drift(const EnsembleState& state, const EffectiveModel& model) {
  Harmonics h;
  h.compute(state.q);
  Drift d;
  force_from(h, model, d.force);
  d.friction.assign(state.size(), 0.0);
  for (int mode = 1; mode <= 2; ++mode) {
    const auto& s = h.sin_n(mode);
    double u = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) u += s[j] * state.p[j];
    const double g = model.friction(mode) * u;
    for (std::size_t i = 0; i < s.size(); ++i) d.friction[i] += g * s[i];
  }
  return d;
}

namespace {

// Harmonics and force at the current positions. The values at the end of one
// step are those at the start of the next, so they are reused whenever the
// positions and the model are unchanged.
struct ForceCache {
  Harmonics h;
  std::vector<double> q;
  std::vector<double> force;
  EffectiveModel model;
  bool eta = false;

  void refresh(const EnsembleState& state, const EffectiveModel& m, bool with_eta) {
    h.compute(state.q);
    q = state.q;
    model = m;
    eta = with_eta;
    force_from(h, m, force);
    if (with_eta) add_eta_from(h, m, force);
  }
  void ensure(const EnsembleState& state, const EffectiveModel& m, bool with_eta) {
    if (q != state.q || !(model == m) || eta != with_eta) refresh(state, m, with_eta);
  }
};

ForceCache& force_cache() {
  thread_local ForceCache cache;
  return cache;
}

void verlet(EnsembleState& state, const EffectiveModel& m, double dt, bool with_eta, bool frozen, ForceCache& c) {
  const double velocity = m.k1 / m.mass;
  const std::size_t n = state.size();
  for (std::size_t i = 0; i < n; ++i) state.p[i] += 0.5 * dt * c.force[i];
  if (!frozen) {
    for (std::size_t i = 0; i < n; ++i) state.q[i] = wrap_phase(state.q[i] + dt * velocity * state.p[i]);
    c.refresh(state, m, with_eta);
  }
  for (std::size_t i = 0; i < n; ++i) state.p[i] += 0.5 * dt * c.force[i];
}

}  // namespace

const char* to_string(Integrator i) { return i == Integrator::verlet ? "verlet" : "yoshida4"; }

Integrator integrator_from_string(const std::string& s) {
  if (s == "verlet") return Integrator::verlet;
  if (s == "yoshida4") return Integrator::yoshida4;
  throw ValidationError("unknown integrator '" + s + "'");
}

void symplectic_step(EnsembleState& state, const EffectiveModel& model, double dt, Integrator scheme,
                     bool include_eta_term, bool frozen_positions) {
  ForceCache& c = force_cache();
  c.ensure(state, model, include_eta_term);
  if (scheme == Integrator::verlet) {
    verlet(state, model, dt, include_eta_term, frozen_positions, c);
    return;
  }
  const double cbrt2 = std::cbrt(2.0);
  const double outer = 1.0 / (2.0 - cbrt2);
  const double inner = -cbrt2 / (2.0 - cbrt2);
  verlet(state, model, outer * dt, include_eta_term, frozen_positions, c);
  verlet(state, model, inner * dt, include_eta_term, frozen_positions, c);
  verlet(state, model, outer * dt, include_eta_term, frozen_positions, c);
}

void step_langevin(EnsembleState& state, const LangevinConfig& cfg, const CounterRng& rng, std::int64_t step) {
  ForceCache& c = force_cache();
  c.ensure(state, cfg.model, cfg.include_eta_term);
  dissipate(state, cfg, c.h, rng, step, 0);
  symplectic_step(state, cfg.model, cfg.dt, cfg.integrator, cfg.include_eta_term, cfg.frozen_positions);
  dissipate(state, cfg, c.h, rng, step, 1);
  state.t += cfg.dt;
  check_bound(state, cfg.momentum_bound, step);
}

EnsembleState initial_state(const LangevinConfig& cfg) {
  const CounterRng rng(cfg.seed);
  const auto n = static_cast<std::size_t>(cfg.n_atoms);
  EnsembleState s;
  s.q.resize(n);
  s.p.assign(n, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  switch (cfg.init.kind) {
    case InitKind::cold_uniform:
    case InitKind::thermal:
      for (std::size_t i = 0; i < n; ++i) s.q[i] = two_pi * rng.uniform(kPositionStream, i);
      break;
    case InitKind::cold_nematic:
      for (std::size_t i = 0; i < n; ++i)
        s.q[i] = wrap_phase((i % 2 ? std::numbers::pi : 0.0) + cfg.init.jitter * rng.normal(kPositionStream, i));
      break;
    case InitKind::canonical: {
      const Couplings a{cfg.model.gamma_1 * cfg.init.beta_0, cfg.model.gamma_2 * cfg.init.beta_0};
      const PhasePoint pp = classify_phase(a, Thermo{cfg.init.beta_0, cfg.model.omega_r, cfg.model.hbar});
      const MeanFieldDensity rho(a, {pp.global_min.y_1, pp.global_min.y_2});
      s.q = rho.sample(n, rng, kPositionStream);
      break;
    }
    case InitKind::explicit_state:
      s = cfg.init.state;
      s.wrap();
      return s;
  }
  if (cfg.init.beta_0 > 0.0) {
    const double sd = std::sqrt(cfg.model.mass / cfg.init.beta_0);
    for (std::size_t i = 0; i < n; ++i) s.p[i] = sd * rng.normal(kMomentumStream, i);
  }
  return s;
}

std::string state_checksum(const EnsembleState& state) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto feed = [&](const std::vector<double>& v) {
    for (double x : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof x);
      for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ull;
      }
    }
  };
  feed(state.q);
  feed(state.p);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void append_record(TrajectoryRecord& rec, const EnsembleState& state, const EffectiveModel& model, bool in_burn_in) {
  const OrderPair th = order_parameters(state);
  PowerSums ps;
  for (double p : state.p) ps.add(p);
  rec.times.push_back(state.t);
  rec.theta_1.push_back(th.theta_1);
  rec.theta_2.push_back(th.theta_2);
  rec.kinetic_temperature.push_back(ps.s2 / (static_cast<double>(state.size()) * model.mass));
  rec.energy.push_back(mean_field_energy(state, model));
  rec.momentum_sums.push_back(ps);
  if (in_burn_in) {
    ++rec.burn_in_records;
  } else {
    for (double p : state.p) rec.momentum_histogram.add(p);
  }
}

TrajectoryRecord run_trajectory(const LangevinConfig& cfg) {
  TrajectoryRecord rec;
  rec.warnings = cfg.validate();
  rec.mass = cfg.model.mass;
  const double width = cfg.histogram_range * std::sqrt(cfg.model.mass / cfg.model.beta);
  rec.momentum_histogram.lo = -width;
  rec.momentum_histogram.hi = width;
  rec.momentum_histogram.counts.assign(static_cast<std::size_t>(cfg.histogram_bins), 0);

  const CounterRng rng(cfg.seed);
  EnsembleState state = initial_state(cfg);

  auto record = [&](std::int64_t step) { append_record(rec, state, cfg.model, step < cfg.burn_in_steps); };

  record(0);
  for (std::int64_t step = 0; step < cfg.n_steps; ++step) {
    step_langevin(state, cfg, rng, step);
    if ((step + 1) % cfg.record_every == 0) record(step + 1);
  }
  rec.checksum = state_checksum(state);
  rec.final_state = std::move(state);
  return rec;
}

constexpr double kMinRunInTau = 50.0;

StationarityReport stationarity_diagnostics(const TrajectoryRecord& rec, double beta_expected,
                                            const DiagnosticsOptions& opts) {
  if (!(beta_expected > 0.0)) throw ValidationError("beta_expected must be positive");
  const auto start = static_cast<std::size_t>(rec.burn_in_records);
  const std::size_t total = rec.kinetic_temperature.size();
  const std::size_t count = total > start ? total - start : 0;
  if (count < opts.min_samples)
    throw InsufficientSamples("diagnostics need " + std::to_string(opts.min_samples) +
                              " post-burn-in records, got " + std::to_string(count));

  StationarityReport r;
  r.samples = count;
  const std::span<const double> temp(rec.kinetic_temperature.data() + start, count);
  const std::span<const double> t1(rec.theta_1.data() + start, count);
  const std::span<const double> t2(rec.theta_2.data() + start, count);

  const BlockingResult bt = blocking_standard_error(temp);
  r.kinetic_temperature = bt.mean;
  r.kinetic_temperature_se = bt.standard_error;
  const BlockingResult b1 = blocking_standard_error(t1);
  const BlockingResult b2 = blocking_standard_error(t2);
  r.theta_1_mean = b1.mean;
  r.theta_1_se = b1.standard_error;
  r.theta_2_mean = b2.mean;
  r.theta_2_se = b2.standard_error;
  r.tau_theta_1 = integrated_autocorrelation_time(t1);
  r.tau_theta_2 = integrated_autocorrelation_time(t2);
  // A blocking plateau found in the last few levels can be spurious; also ask
  // for the run to span many autocorrelation times.
  const auto long_enough = [&](double tau) { return static_cast<double>(count) >= kMinRunInTau * tau; };
  r.temperature_se_converged = bt.plateau && long_enough(integrated_autocorrelation_time(temp));
  r.theta_1_se_converged = b1.plateau && long_enough(r.tau_theta_1);
  r.theta_2_se_converged = b2.plateau && long_enough(r.tau_theta_2);
  r.moments = pooled_moments(std::span<const PowerSums>(rec.momentum_sums.data() + start, count), opts.moment_blocks);

  const double target = 1.0 / beta_expected;
  if (std::all_of(temp.begin(), temp.end(), [&](double x) { return x == temp.front(); })) {
    r.zero_diffusion = true;
    r.temperature_z = r.kinetic_temperature == target ? 0.0 : INFINITY;
    r.diagnosis = "kinetic temperature is constant: no diffusion reaches the momenta";
    return r;
  }
  r.temperature_z = std::abs(r.kinetic_temperature - target) / r.kinetic_temperature_se;
  r.temperature_ok = r.temperature_z <= opts.temperature_sigma;
  r.gaussian_ok = std::abs(r.moments.skewness) <= opts.moment_sigma * r.moments.skewness_se &&
                  std::abs(r.moments.excess_kurtosis) <= opts.moment_sigma * r.moments.excess_kurtosis_se;
  r.pass = r.temperature_ok && r.gaussian_ok && r.temperature_se_converged;
  if (!r.temperature_se_converged) r.diagnosis = "run too short: kinetic temperature error did not converge";
  else if (!r.temperature_ok) r.diagnosis = "kinetic temperature differs from 1/beta";
  else if (!r.gaussian_ok) r.diagnosis = "momentum distribution is not Gaussian";
  else r.diagnosis = "consistent with exp(-beta H)";
  if (!r.theta_1_se_converged || !r.theta_2_se_converged)
    r.diagnosis += "; order-parameter errors are lower bounds (run too short for their correlation time)";
  return r;
}

}  // namespace selforg
