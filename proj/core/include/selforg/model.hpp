#pragma once

// Physical parameters of the two-mode cavity, the effective long-range model
// they induce, and the elementary observables of an N-atom ensemble.
//
// Units: every formula keeps hbar, mass and k explicit. The default unit
// system is dimensionless with hbar = mass = k = 1, so omega_r = 1/2,
// k1 = 1/2 and k2 = 1.

#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace selforg {

enum class UnitSystem { dimensionless, si };

struct CavityParams {
  double delta_1 = -1.0;  ///< pump-cavity detuning of mode 1
  double delta_2 = -1.0;
  double kappa_1 = 1.0;   ///< cavity loss rate
  double kappa_2 = 1.0;
  double s_1 = 0.0;       ///< coherent-scattering amplitude
  double s_2 = 0.0;
  int n_atoms = 1;
  double k = 1.0;         ///< optical wavenumber
  double phi = std::numbers::pi / 3.0;  ///< tilt of cavity 1; only pi/3 is supported
  double hbar = 1.0;
  double mass = 1.0;
  UnitSystem units = UnitSystem::dimensionless;

  /// Projected wavenumbers. phi = pi/3 gives k1 = k/2 exactly.
  double k1() const { return 0.5 * k; }
  double k2() const { return k; }
  double omega_r() const { return hbar * k * k / (2.0 * mass); }

  double delta(int mode) const { return mode == 1 ? delta_1 : delta_2; }
  double kappa(int mode) const { return mode == 1 ? kappa_1 : kappa_2; }
  double s(int mode) const { return mode == 1 ? s_1 : s_2; }

  /// Throws ValidationError when a field invariant is broken.
  void validate() const;

  bool operator==(const CavityParams&) const = default;
};

struct EffectiveModel {
  double alpha_1 = 0.0;
  double alpha_2 = 0.0;
  double beta = 1.0;
  double gamma_1 = 0.0;  ///< coupling energy alpha_1 / beta
  double gamma_2 = 0.0;
  double d_1 = 0.0;      ///< momentum diffusion
  double d_2 = 0.0;
  double g_1 = 0.0;      ///< friction, negative for red detuning
  double g_2 = 0.0;
  double eta_1 = 0.0;    ///< cross diffusion
  double eta_2 = 0.0;
  double omega_r = 0.5;
  double k1 = 0.5;
  double k2 = 1.0;
  int n_atoms = 1;
  double hbar = 1.0;
  double mass = 1.0;
  double k = 1.0;
  UnitSystem units = UnitSystem::dimensionless;

  double gamma(int mode) const { return mode == 1 ? gamma_1 : gamma_2; }
  double diffusion(int mode) const { return mode == 1 ? d_1 : d_2; }
  double friction(int mode) const { return mode == 1 ? g_1 : g_2; }
  double eta(int mode) const { return mode == 1 ? eta_1 : eta_2; }
  double wavenumber(int mode) const { return mode == 1 ? k1 : k2; }

  /// Purely conservative model (no friction, no diffusion) in dimensionless units.
  static EffectiveModel hamiltonian(double alpha_1, double alpha_2, double beta, int n_atoms);

  /// Dimensionless cavity parameters that realize (alpha_1, alpha_2, beta) with
  /// delta_n = -kappa_n, which zeroes eta_n.
  static CavityParams cavity_for(double alpha_1, double alpha_2, double beta, int n_atoms);

  bool operator==(const EffectiveModel&) const = default;
};

/// N phases q_i = k x_i / 2 in [0, 2 pi) and momenta p_i.
struct EnsembleState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;

  EnsembleState() = default;
  EnsembleState(std::vector<double> q_in, std::vector<double> p_in, double t_in = 0.0);

  std::size_t size() const { return q.size(); }

  /// Reduce every q into [0, 2 pi).
  void wrap();

  bool operator==(const EnsembleState&) const = default;
};

double wrap_phase(double q);

struct OrderPair {
  double theta_1 = 0.0;
  double theta_2 = 0.0;
  bool operator==(const OrderPair&) const = default;
};

struct CavityFields {
  std::complex<double> e_1;
  std::complex<double> e_2;
};

/// Dimensionless GHMF reading of the couplings. The literal identification
/// alpha_1/beta -> Delta is not dimensionless, so `ambiguous` is always set.
struct GhmfMapping {
  double delta = 0.0;              ///< alpha_1 / (alpha_1 + alpha_2)
  double reduced_temperature = 0.0;  ///< 1 / (alpha_1 + alpha_2), energy unit gamma_1 + gamma_2
  bool ambiguous = true;
};

/// Relative tolerance used for the equal-temperature condition by default.
inline constexpr double kStationarityTolerance = 1e-9;

/// True iff both detunings are negative and the two single-mode inverse
/// temperatures agree to `tol` (relative). Throws ValidationError if tol < 0.
bool validate_stationarity_condition(const CavityParams& cavity, double tol = kStationarityTolerance);

/// Inverse temperature of a single pumped mode, -4 delta / (hbar (delta^2 + kappa^2)).
double mode_beta(const CavityParams& cavity, int mode);

/// Maps cavity parameters onto couplings, temperature and friction/diffusion
/// coefficients. Modes with s_n = 0 are inactive and do not constrain the
/// temperature. Throws StationarityViolation when no thermal steady state exists.
EffectiveModel map_cavity_to_effective(const CavityParams& cavity, double tol = kStationarityTolerance);

/// Semiclassical validity parameter per mode, (k dp / m) / |kappa_n + i delta_n|.
std::pair<double, double> semiclassical_epsilon(const CavityParams& cavity, double delta_p);

OrderPair order_parameters(std::span<const double> q);
inline OrderPair order_parameters(const EnsembleState& state) { return order_parameters(state.q); }

double kinetic_energy(const EnsembleState& state, double mass);

/// H = sum p^2 / 2m - N (gamma_1 Theta_1^2 + gamma_2 Theta_2^2), O(N).
double mean_field_energy(const EnsembleState& state, const EffectiveModel& model);

/// Stationary intracavity amplitudes N S_n Theta_n / (delta_n + i kappa_n).
CavityFields cavity_field_amplitudes(const EffectiveModel& model, const CavityParams& cavity,
                                     const OrderPair& theta);

GhmfMapping ghmf_mapping(double alpha_1, double alpha_2);

}  // namespace selforg
