#pragma once

// Canonical mean-field thermodynamics of the two-harmonic model.
//
// The free energy per particle is
//
//   F(y) = ln(pi hbar omega_r beta) / (2 beta) + g(y) / beta,
//   g(y) = alpha_1 y1^2 + alpha_2 y2^2 - ln I(y1, y2),
//
// and its stationary points satisfy y_n = <cos(n q)>_y. The Hessian of g
// is 2 diag(alpha) - 4 diag(alpha) C diag(alpha), with C the Gibbs
// covariance of (cos q, cos 2q). Stability is read from the congruent matrix
// I - 2 sqrt(alpha) C sqrt(alpha), which stays meaningful when a coupling is 0.

#include <array>
#include <string>
#include <vector>

#include "selforg/model.hpp"
#include "selforg/quadrature.hpp"

namespace selforg {

enum class Stability { minimum, saddle, maximum };
enum class Phase { paramagnetic, nematic, ferromagnetic };

const char* to_string(Stability s);
const char* to_string(Phase p);
Phase phase_from_string(const std::string& s);

struct FixedPoint {
  double y_1 = 0.0;
  double y_2 = 0.0;
  double g_value = 0.0;  ///< alpha_1 y1^2 + alpha_2 y2^2 - ln I
  Stability stability = Stability::saddle;
  double residual_norm = 0.0;

  Point2 point() const { return {y_1, y_2}; }
};

/// Thermodynamic constants entering the free energy.
struct Thermo {
  double beta = 1.0;
  double omega_r = 0.5;
  double hbar = 1.0;
};

struct PhasePoint {
  double alpha_1 = 0.0;
  double alpha_2 = 0.0;
  Phase phase = Phase::paramagnetic;
  FixedPoint global_min;
  double free_energy = 0.0;
  std::vector<FixedPoint> all_minima;
  bool coexistence = false;  ///< another minimum is degenerate within kDegenerateTolerance
  int dropped_seeds = 0;     ///< seeds that failed to converge
};

/// Order parameters with |y| below this count as zero.
inline constexpr double kClassificationTolerance = 1e-4;
/// Minima closer than this in free energy are treated as degenerate.
inline constexpr double kDegenerateTolerance = 1e-10;

struct SolverOptions {
  double damping = 0.5;        ///< lambda in y <- (1 - lambda) y + lambda G(y)
  int max_iter = 10000;
  double tolerance = 1e-10;    ///< infinity norm of the self-consistency residual
  double dedup_distance = 1e-6;
  int grid_scan = 41;          ///< points per axis of the safety-net scan, 0 disables it
  int scan_log2_nodes = 7;     ///< quadrature size used by the scan only
  QuadratureOptions quadrature;
};

std::vector<Point2> default_seeds();

/// ln(pi hbar omega_r beta)/(2 beta) + g(y)/beta.
double free_energy(Point2 y, Couplings alpha, const Thermo& thermo, const QuadratureOptions& q = {});

/// g(y) = alpha_1 y1^2 + alpha_2 y2^2 - ln I(y).
double inner_free_energy(Point2 y, Couplings alpha, const QuadratureOptions& q = {});

/// (y1 - <cos q>, y2 - <cos 2q>).
std::array<double, 2> self_consistency_residual(Point2 y, Couplings alpha, const QuadratureOptions& q = {});

/// Analytic gradient of g.
std::array<double, 2> gradient_g(Point2 y, Couplings alpha, const QuadratureOptions& q = {});

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Eigenvalues (ascending) of a symmetric 2x2 matrix.
std::array<double, 2> symmetric_eigenvalues(const Matrix2& m);

struct StabilityReport {
  Matrix2 hessian{};                      ///< of g
  std::array<double, 2> eigenvalues{};    ///< of the congruent stability matrix
  Stability stability = Stability::saddle;
  double residual_norm = 0.0;
  /// alpha_1 < 1 and alpha_2 < 1; meaningful at the origin.
  bool paramagnetic_condition = false;
  /// alpha_1 < 1/(1+y2) and 1 < alpha_2 < 1/(1-y2^2); meaningful when y1 = 0, y2 != 0.
  bool nematic_condition = false;
};

/// Stability of a fixed point from the analytic Hessian. Throws NotAFixedPoint
/// when the self-consistency residual exceeds `tolerance`.
StabilityReport hessian_classify(Point2 point, Couplings alpha, double tolerance = 1e-8,
                                 const QuadratureOptions& q = {});

/// Refines one seed. Returns false when max_iter is exhausted.
bool refine_fixed_point(Point2 seed, Couplings alpha, const SolverOptions& opts, FixedPoint& out);

/// Damped fixed-point iteration with Newton polish from every seed, deduplicated
/// and stability-labelled. Non-converging seeds are dropped and counted.
std::vector<FixedPoint> solve_fixed_points(Couplings alpha, const std::vector<Point2>& seeds,
                                           const SolverOptions& opts = {}, int* dropped = nullptr);

/// Largest non-negative root of t = I_1(2 alpha_2 t) / I_0(2 alpha_2 t); 0 for alpha_2 <= 1.
double nematic_bessel_solve(double alpha_2);

/// alpha_1 threshold 1/(1 + Theta_2) of the nematic branch with the given sign of Theta_2.
double nematic_threshold(double alpha_2, bool negative_branch = false);

/// Global free-energy minimum and its phase label.
PhasePoint classify_phase(Couplings alpha, const Thermo& thermo, const SolverOptions& opts = {});

/// Phase label of an order-parameter pair under kClassificationTolerance.
Phase label_phase(double y_1, double y_2);

/// 1/(2 beta) - (alpha_1 Theta_1^2 + alpha_2 Theta_2^2)/beta.
double canonical_energy_per_particle(double beta, Couplings alpha, const OrderPair& theta);

}  // namespace selforg
