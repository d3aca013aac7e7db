#include "selforg/model.hpp"

#include <cmath>
#include <string>

#include "selforg/errors.hpp"

namespace selforg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double lorentz_ratio(double delta, double kappa) { return delta / (delta * delta + kappa * kappa); }

}  // namespace

void CavityParams::validate() const {
  if (!(kappa_1 > 0.0) || !(kappa_2 > 0.0)) throw ValidationError("kappa_n must be positive");
  if (!(s_1 >= 0.0) || !(s_2 >= 0.0)) throw ValidationError("s_n must be non-negative");
  if (n_atoms < 1) throw ValidationError("n_atoms must be at least 1");
  if (!(k > 0.0)) throw ValidationError("k must be positive");
  if (!(hbar > 0.0) || !(mass > 0.0)) throw ValidationError("hbar and mass must be positive");
  if (!std::isfinite(delta_1) || !std::isfinite(delta_2)) throw ValidationError("detunings must be finite");
  // Positions are stored as q = k x / 2, which presumes k1 = k cos(phi) = k / 2.
  if (std::abs(phi - std::numbers::pi / 3.0) > 1e-12)
    throw ValidationError("only phi = pi/3 is supported (k1 = k/2)");
}

EnsembleState::EnsembleState(std::vector<double> q_in, std::vector<double> p_in, double t_in)
    : q(std::move(q_in)), p(std::move(p_in)), t(t_in) {
  if (q.size() != p.size()) throw ValidationError("q and p must have equal length");
  wrap();
}

double wrap_phase(double q) {
  double r = std::fmod(q, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

void EnsembleState::wrap() {
  for (double& qi : q) qi = wrap_phase(qi);
}

bool validate_stationarity_condition(const CavityParams& cavity, double tol) {
  if (!(tol >= 0.0)) throw ValidationError("stationarity tolerance must be non-negative");
  if (!(cavity.delta_1 < 0.0) || !(cavity.delta_2 < 0.0)) return false;
  const double r1 = lorentz_ratio(cavity.delta_1, cavity.kappa_1);
  const double r2 = lorentz_ratio(cavity.delta_2, cavity.kappa_2);
  return std::abs(r1 - r2) <= tol * std::abs(r2);
}

double mode_beta(const CavityParams& cavity, int mode) {
  const double d = cavity.delta(mode);
  const double kap = cavity.kappa(mode);
  return -4.0 * d / (cavity.hbar * (d * d + kap * kap));
}

EffectiveModel map_cavity_to_effective(const CavityParams& cavity, double tol) {
  cavity.validate();
  if (!(tol >= 0.0)) throw ValidationError("stationarity tolerance must be non-negative");

  // Only pumped modes constrain the temperature; with no pumped mode both do.
  bool active[3] = {false, cavity.s_1 > 0.0, cavity.s_2 > 0.0};
  if (!active[1] && !active[2]) active[1] = active[2] = true;

  for (int n = 1; n <= 2; ++n) {
    if (active[n] && !(cavity.delta(n) < 0.0))
      throw StationarityViolation("detuning delta_" + std::to_string(n) +
                                  " must be negative for a stationary state");
  }
  double beta = 0.0;
  if (active[1] && active[2]) {
    if (!validate_stationarity_condition(cavity, tol))
      throw StationarityViolation("mode temperatures differ: delta_n/(delta_n^2+kappa_n^2) not equal");
    beta = 0.5 * (mode_beta(cavity, 1) + mode_beta(cavity, 2));
  } else {
    beta = mode_beta(cavity, active[1] ? 1 : 2);
  }

  EffectiveModel m;
  m.beta = beta;
  m.n_atoms = cavity.n_atoms;
  m.hbar = cavity.hbar;
  m.mass = cavity.mass;
  m.k = cavity.k;
  m.k1 = cavity.k1();
  m.k2 = cavity.k2();
  m.omega_r = cavity.omega_r();
  m.units = cavity.units;

  const double n_atoms = static_cast<double>(cavity.n_atoms);
  double alpha[3]{}, diff[3]{}, fric[3]{}, eta[3]{};
  for (int n = 1; n <= 2; ++n) {
    const double d = cavity.delta(n);
    const double kap = cavity.kappa(n);
    const double s2 = cavity.s(n) * cavity.s(n);
    const double lor = d * d + kap * kap;
    const double hk = cavity.hbar * (n == 1 ? m.k1 : m.k2);
    alpha[n] = 4.0 * n_atoms * s2 * d * d / (lor * lor);
    diff[n] = hk * hk * s2 * kap / lor;
    const double kn = n == 1 ? m.k1 : m.k2;
    fric[n] = cavity.hbar * kn * kn / cavity.mass * s2 * 4.0 * d * kap / (lor * lor);
    const double abs_d = std::abs(d);
    eta[n] = hk * hk / cavity.mass * s2 * (kap - abs_d) * (kap + abs_d) / (lor * lor);
  }
  m.alpha_1 = alpha[1];
  m.alpha_2 = alpha[2];
  m.gamma_1 = alpha[1] / beta;
  m.gamma_2 = alpha[2] / beta;
  m.d_1 = diff[1];
  m.d_2 = diff[2];
  m.g_1 = fric[1];
  m.g_2 = fric[2];
  m.eta_1 = eta[1];
  m.eta_2 = eta[2];
  return m;
}

EffectiveModel EffectiveModel::hamiltonian(double alpha_1, double alpha_2, double beta, int n_atoms) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(alpha_1 >= 0.0) || !(alpha_2 >= 0.0)) throw ValidationError("alpha_n must be non-negative");
  if (n_atoms < 1) throw ValidationError("n_atoms must be at least 1");
  EffectiveModel m;
  m.alpha_1 = alpha_1;
  m.alpha_2 = alpha_2;
  m.beta = beta;
  m.gamma_1 = alpha_1 / beta;
  m.gamma_2 = alpha_2 / beta;
  m.n_atoms = n_atoms;
  return m;
}

CavityParams EffectiveModel::cavity_for(double alpha_1, double alpha_2, double beta, int n_atoms) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(alpha_1 >= 0.0) || !(alpha_2 >= 0.0)) throw ValidationError("alpha_n must be non-negative");
  if (n_atoms < 1) throw ValidationError("n_atoms must be at least 1");
  // delta = -kappa gives beta = 2 / (hbar kappa) and alpha_n = N S_n^2 / kappa^2.
  CavityParams c;
  const double kappa = 2.0 / beta;
  c.kappa_1 = c.kappa_2 = kappa;
  c.delta_1 = c.delta_2 = -kappa;
  c.n_atoms = n_atoms;
  c.s_1 = kappa * std::sqrt(alpha_1 / n_atoms);
  c.s_2 = kappa * std::sqrt(alpha_2 / n_atoms);
  return c;
}

std::pair<double, double> semiclassical_epsilon(const CavityParams& cavity, double delta_p) {
  if (!(delta_p > 0.0)) throw ValidationError("momentum width must be positive");
  const double doppler = cavity.k * delta_p / cavity.mass;
  auto eps = [&](int n) { return doppler / std::abs(std::complex<double>(cavity.kappa(n), cavity.delta(n))); };
  return {eps(1), eps(2)};
}

OrderPair order_parameters(std::span<const double> q) {
  if (q.empty()) return {};
  double c1 = 0.0, c2 = 0.0;
  for (double qi : q) {
    c1 += std::cos(qi);
    c2 += std::cos(2.0 * qi);
  }
  const double n = static_cast<double>(q.size());
  return {c1 / n, c2 / n};
}

double kinetic_energy(const EnsembleState& state, double mass) {
  double sum = 0.0;
  for (double pi : state.p) sum += pi * pi;
  return 0.5 * sum / mass;
}

double mean_field_energy(const EnsembleState& state, const EffectiveModel& model) {
  const OrderPair th = order_parameters(state);
  const double n = static_cast<double>(state.size());
  return kinetic_energy(state, model.mass) -
         n * (model.gamma_1 * th.theta_1 * th.theta_1 + model.gamma_2 * th.theta_2 * th.theta_2);
}

CavityFields cavity_field_amplitudes(const EffectiveModel& model, const CavityParams& cavity,
                                     const OrderPair& theta) {
  const double n_atoms = static_cast<double>(model.n_atoms);
  auto field = [&](int n, double th) {
    return n_atoms * cavity.s(n) * th / std::complex<double>(cavity.delta(n), cavity.kappa(n));
  };
  return {field(1, theta.theta_1), field(2, theta.theta_2)};
}

GhmfMapping ghmf_mapping(double alpha_1, double alpha_2) {
  const double total = alpha_1 + alpha_2;
  if (!(total > 0.0)) throw ValidationError("GHMF mapping needs alpha_1 + alpha_2 > 0");
  return {alpha_1 / total, 1.0 / total, true};
}

}  // namespace selforg
