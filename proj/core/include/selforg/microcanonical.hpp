#pragma once

// Hamiltonian dynamics at fixed energy, caloric curves and the comparison of
// microcanonical averages with the canonical mean-field prediction.

#include <cstdint>
#include <string>
#include <vector>

#include "selforg/equilibrium.hpp"
#include "selforg/langevin.hpp"

namespace selforg {

struct MDConfig {
  Couplings alpha;
  double beta_ref = 1.0;  ///< energy scale: gamma_n = alpha_n / beta_ref
  int n_atoms = 100;
  double dt = 0.002;
  std::int64_t n_steps = 10000;
  double energy_per_particle = 0.5;
  std::uint64_t seed = 1;
  std::int64_t record_every = 10;
  /// Records discarded before averaging; negative selects 20 integrated
  /// autocorrelation times of Theta_2, re-estimated until it settles.
  std::int64_t burn_in_records = -1;
  double momentum_bound = 1e6;
  Integrator integrator = Integrator::yoshida4;

  EffectiveModel model() const { return EffectiveModel::hamiltonian(alpha.alpha_1, alpha.alpha_2, beta_ref, n_atoms); }
  /// Lowest reachable energy per particle, -(alpha_1 + alpha_2) / beta_ref.
  double energy_floor() const { return -(alpha.alpha_1 + alpha.alpha_2) / beta_ref; }
  void validate() const;
  bool operator==(const MDConfig&) const = default;
};

/// Inverse temperature at which the canonical mean-field energy per particle,
/// 1/(2b) - (gamma_1 Theta_1^2 + gamma_2 Theta_2^2), equals epsilon.
double auxiliary_beta(const MDConfig& config, double epsilon);

/// Canonical-like draw at the auxiliary temperature with momenta rescaled so
/// that H / N equals the target energy to 1e-12.
EnsembleState sample_microcanonical_init(const MDConfig& config);

/// One symplectic step under the mean-field force.
void step_md(EnsembleState& state, const EffectiveModel& model, double dt, Integrator scheme = Integrator::yoshida4,
             double momentum_bound = 1e6, std::int64_t step = 0);

/// Integrates from sample_microcanonical_init and records like run_trajectory.
TrajectoryRecord run_md(const MDConfig& config);

/// max_t |E(t) - E(0)| / max(|E(0)|, K(0)) over the record.
double relative_energy_drift(const TrajectoryRecord& record);

/// Records to discard: 20 integrated autocorrelation times of Theta_2,
/// iterated on the remaining series, at most half of the record.
std::int64_t adaptive_burn_in(const TrajectoryRecord& record);

struct CaloricPoint {
  double epsilon = 0.0;
  double kinetic_temperature = 0.0;
  double kinetic_temperature_se = 0.0;
  double theta_1_avg = 0.0;
  double theta_1_se = 0.0;
  double theta_2_avg = 0.0;
  double theta_2_se = 0.0;
  double energy_drift = 0.0;
  std::int64_t burn_in_records = 0;
  std::size_t samples = 0;
  bool ok = true;
  std::string error;
};

/// Averages of one microcanonical run.
CaloricPoint measure_md(const MDConfig& config);

/// One point per energy, computed in parallel; failures are reported per point.
std::vector<CaloricPoint> caloric_curve(const std::vector<double>& epsilons, const MDConfig& config, int workers = 1);

struct EnsembleComparison {
  Couplings alpha;
  double beta = 1.0;
  PhasePoint canonical;
  double epsilon = 0.0;
  CaloricPoint micro;
  double sigma_1 = 0.0;  ///< |Theta_1 difference| / MD standard error
  double sigma_2 = 0.0;
  double temperature_sigma = 0.0;
  bool agree = true;
};

inline constexpr double kDisagreeSigma = 5.0;
inline constexpr double kDisagreeMinimum = 0.05;

/// Canonical minimum mapped to its energy, then microcanonical dynamics at
/// that energy. Disagreement needs both > 5 sigma and > 0.05 absolute in an
/// order parameter.
EnsembleComparison ensemble_compare(Couplings alpha, double beta, const MDConfig& config);

}  // namespace selforg
