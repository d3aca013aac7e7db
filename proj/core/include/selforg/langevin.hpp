#pragma once

// Stochastic N-atom dynamics whose Fokker-Planck equation has the cavity
// friction and the rank-one momentum diffusion sum_n D_n sin(k_n x_i) sin(k_n x_j).
// Each mode contributes one shared Wiener process.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selforg/model.hpp"
#include "selforg/rng.hpp"
#include "selforg/stats.hpp"

namespace selforg {

/// cold_uniform: uniform phases; cold_nematic: phases at 0 and pi with jitter;
/// thermal: uniform phases with momenta at beta_0; canonical: phases from the
/// mean-field Boltzmann density at beta_0 with momenta at beta_0;
/// explicit_state: a given state.
enum class InitKind { cold_uniform, cold_nematic, thermal, canonical, explicit_state };

const char* to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);

struct InitSpec {
  InitKind kind = InitKind::thermal;
  double beta_0 = 0.0;  ///< momentum temperature; 0 leaves the momenta at rest (not allowed for `thermal`)
  double jitter = 0.01;        ///< position noise for `cold_nematic`
  EnsembleState state;         ///< used by `explicit_state`

  bool operator==(const InitSpec&) const = default;
};

/// Symplectic core shared by the stochastic and the Hamiltonian dynamics:
/// velocity Verlet, or its fourth-order symmetric triple-jump composition.
enum class Integrator { verlet, yoshida4 };

const char* to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

struct Histogram {
  double lo = -6.0;
  double hi = 6.0;
  std::vector<std::uint64_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * bin_width(); }
  void add(double x);
  bool operator==(const Histogram&) const = default;
};

struct LangevinConfig {
  EffectiveModel model;
  int n_atoms = 100;
  double dt = 0.005;
  std::int64_t n_steps = 1000;
  std::uint64_t seed = 1;
  std::int64_t record_every = 10;
  std::int64_t burn_in_steps = 0;  ///< histogram and diagnostics ignore earlier records
  InitSpec init;
  bool include_eta_term = false;
  Integrator integrator = Integrator::yoshida4;
  bool frozen_positions = false;   ///< skip the position drift (pure momentum process)
  double momentum_bound = 1e6;
  int histogram_bins = 120;
  double histogram_range = 6.0;    ///< in units of sqrt(m / beta)

  /// Throws ValidationError on a broken invariant; returns advisory warnings.
  std::vector<std::string> validate() const;
  bool operator==(const LangevinConfig&) const = default;
};

struct Drift {
  std::vector<double> force;     ///< conservative, -dH/dx_i
  std::vector<double> friction;  ///< sum_n Gamma_n sin(k_n x_i) sum_j sin(k_n x_j) p_j
};

/// O(N) drift using the collective sums.
Drift langevin_drift(const EnsembleState& state, const EffectiveModel& model);

/// Conservative force only, written into `force` (resized).
void mean_field_force(const EnsembleState& state, const EffectiveModel& model, std::vector<double>& force);

/// Momentum drift of the first-order part of the eta cross-diffusion term.
void eta_drift(const EnsembleState& state, const EffectiveModel& model, std::vector<double>& drift);

/// Conservative (plus optional eta) dynamics over dt; time-reversible.
void symplectic_step(EnsembleState& state, const EffectiveModel& model, double dt, Integrator scheme,
                     bool include_eta_term = false, bool frozen_positions = false);

/// One Strang step: exact collective damping and noise over dt/2, the
/// symplectic core over dt, exact damping and noise over dt/2. Noise is
/// indexed by (step, mode) in the counter-based generator.
void step_langevin(EnsembleState& state, const LangevinConfig& config, const CounterRng& rng, std::int64_t step);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> theta_1;
  std::vector<double> theta_2;
  std::vector<double> kinetic_temperature;  ///< <p^2>/m over atoms
  std::vector<double> energy;               ///< mean-field Hamiltonian, total
  std::vector<PowerSums> momentum_sums;     ///< per record
  std::int64_t burn_in_records = 0;         ///< records before the burn-in ends
  Histogram momentum_histogram;             ///< momenta of the records flagged post-burn-in when taken
  EnsembleState final_state;
  std::string checksum;                     ///< FNV-1a of the final state bytes, hex
  std::vector<std::string> warnings;
  double mass = 1.0;
};

/// Appends the observables of `state`; its momenta enter the histogram unless
/// `in_burn_in`, in which case burn_in_records is incremented.
void append_record(TrajectoryRecord& record, const EnsembleState& state, const EffectiveModel& model,
                   bool in_burn_in);

EnsembleState initial_state(const LangevinConfig& config);

/// Integrates n_steps, recording every record_every steps (and step 0).
TrajectoryRecord run_trajectory(const LangevinConfig& config);

/// FNV-1a 64-bit digest of q and p, as 16 hex digits.
std::string state_checksum(const EnsembleState& state);

struct StationarityReport {
  double kinetic_temperature = 0.0;
  double kinetic_temperature_se = 0.0;
  double temperature_z = 0.0;
  MomentEstimate moments;
  double tau_theta_1 = 0.0;  ///< in records
  double tau_theta_2 = 0.0;
  double theta_1_mean = 0.0;
  double theta_1_se = 0.0;
  double theta_2_mean = 0.0;
  double theta_2_se = 0.0;
  std::size_t samples = 0;
  /// Blocking reached a plateau and the run spans >= 50 tau_int; otherwise the
  /// standard error is a lower bound.
  bool temperature_se_converged = false;
  bool theta_1_se_converged = false;
  bool theta_2_se_converged = false;
  bool zero_diffusion = false;  ///< the kinetic temperature never fluctuated
  bool temperature_ok = false;
  bool gaussian_ok = false;
  bool pass = false;
  std::string diagnosis;
};

struct DiagnosticsOptions {
  double temperature_sigma = 3.0;
  double moment_sigma = 4.0;
  std::size_t moment_blocks = 20;
  std::size_t min_samples = 100;
};

/// Checks the post-burn-in part of a record against exp(-beta H).
StationarityReport stationarity_diagnostics(const TrajectoryRecord& record, double beta_expected,
                                            const DiagnosticsOptions& opts = {});

}  // namespace selforg
