#include "selforg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selforg/bessel.hpp"
#include "selforg/errors.hpp"

namespace selforg {

namespace {

// Eigenvalues of the stability matrix within this band of zero count as
// marginal and are not allowed to demote a minimum.
constexpr double kMarginal = 1e-9;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double residual_inf(Point2 y, const PartitionMoments& m) {
  return std::max(std::abs(y.y1 - m.mean_1), std::abs(y.y2 - m.mean_2));
}

Matrix2 stability_matrix(Couplings alpha, const PartitionMoments& m) {
  const double s1 = std::sqrt(alpha.alpha_1);
  const double s2 = std::sqrt(alpha.alpha_2);
  Matrix2 out;
  out[0][0] = 1.0 - 2.0 * alpha.alpha_1 * m.cov_11;
  out[1][1] = 1.0 - 2.0 * alpha.alpha_2 * m.cov_22;
  out[0][1] = out[1][0] = -2.0 * s1 * s2 * m.cov_12;
  return out;
}

Stability stability_from(const std::array<double, 2>& eig) {
  if (eig[0] >= -kMarginal) return Stability::minimum;
  if (eig[1] < -kMarginal) return Stability::maximum;
  return Stability::saddle;
}

double g_from(Point2 y, Couplings alpha, const PartitionMoments& m) {
  return alpha.alpha_1 * y.y1 * y.y1 + alpha.alpha_2 * y.y2 * y.y2 - m.log_integral;
}

// Preferred representative among degenerate minima: larger y1, then larger y2.
bool preferred(const FixedPoint& a, const FixedPoint& b) {
  if (std::abs(a.y_1 - b.y_1) > 1e-8) return a.y_1 > b.y_1;
  return a.y_2 > b.y_2;
}

bool by_g_then_position(const FixedPoint& a, const FixedPoint& b) {
  if (a.g_value != b.g_value) return a.g_value < b.g_value;
  if (a.y_1 != b.y_1) return a.y_1 < b.y_1;
  return a.y_2 < b.y_2;
}

void insert_unique(std::vector<FixedPoint>& list, const FixedPoint& fp, double dedup) {
  for (const auto& other : list) {
    if (std::hypot(other.y_1 - fp.y_1, other.y_2 - fp.y_2) <= dedup) return;
  }
  list.push_back(fp);
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::minimum: return "minimum";
    case Stability::saddle: return "saddle";
    case Stability::maximum: return "maximum";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::paramagnetic: return "paramagnetic";
    case Phase::nematic: return "nematic";
    case Phase::ferromagnetic: return "ferromagnetic";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  if (s == "paramagnetic") return Phase::paramagnetic;
  if (s == "nematic") return Phase::nematic;
  if (s == "ferromagnetic") return Phase::ferromagnetic;
  throw ValidationError("unknown phase label '" + s + "'");
}

std::vector<Point2> default_seeds() {
  return {{0.0, 0.0}, {0.9, 0.9}, {-0.9, 0.9}, {0.0, 0.9}, {0.0, -0.9}, {0.5, -0.5}};
}

double inner_free_energy(Point2 y, Couplings alpha, const QuadratureOptions& q) {
  return g_from(y, alpha, partition_moments(y, alpha, q));
}

double free_energy(Point2 y, Couplings alpha, const Thermo& thermo, const QuadratureOptions& q) {
  if (!(thermo.beta > 0.0)) throw ValidationError("beta must be positive");
  const double b = thermo.beta;
  return std::log(std::numbers::pi * thermo.hbar * thermo.omega_r * b) / (2.0 * b) +
         inner_free_energy(y, alpha, q) / b;
}

std::array<double, 2> self_consistency_residual(Point2 y, Couplings alpha, const QuadratureOptions& q) {
  const PartitionMoments m = partition_moments(y, alpha, q);
  return {y.y1 - m.mean_1, y.y2 - m.mean_2};
}

std::array<double, 2> gradient_g(Point2 y, Couplings alpha, const QuadratureOptions& q) {
  const PartitionMoments m = partition_moments(y, alpha, q);
  return {2.0 * alpha.alpha_1 * (y.y1 - m.mean_1), 2.0 * alpha.alpha_2 * (y.y2 - m.mean_2)};
}

std::array<double, 2> symmetric_eigenvalues(const Matrix2& m) {
  const double mean = 0.5 * (m[0][0] + m[1][1]);
  const double half_diff = 0.5 * (m[0][0] - m[1][1]);
  const double r = std::hypot(half_diff, m[0][1]);
  return {mean - r, mean + r};
}

StabilityReport hessian_classify(Point2 point, Couplings alpha, double tolerance, const QuadratureOptions& q) {
  const PartitionMoments m = partition_moments(point, alpha, q);
  StabilityReport r;
  r.residual_norm = residual_inf(point, m);
  if (r.residual_norm > tolerance)
    throw NotAFixedPoint("self-consistency residual " + std::to_string(r.residual_norm) +
                         " exceeds tolerance");
  const double a1 = alpha.alpha_1, a2 = alpha.alpha_2;
  r.hessian[0][0] = 2.0 * a1 - 4.0 * a1 * a1 * m.cov_11;
  r.hessian[1][1] = 2.0 * a2 - 4.0 * a2 * a2 * m.cov_22;
  r.hessian[0][1] = r.hessian[1][0] = -4.0 * a1 * a2 * m.cov_12;
  r.eigenvalues = symmetric_eigenvalues(stability_matrix(alpha, m));
  r.stability = stability_from(r.eigenvalues);
  r.paramagnetic_condition = a1 < 1.0 && a2 < 1.0;
  const double t2 = point.y2;
  r.nematic_condition = a1 < 1.0 / (1.0 + t2) && 1.0 < a2 && a2 * (1.0 - t2 * t2) < 1.0;
  return r;
}

bool refine_fixed_point(Point2 seed, Couplings alpha, const SolverOptions& opts, FixedPoint& out) {
  Point2 y{clamp_unit(seed.y1), clamp_unit(seed.y2)};
  const double lambda = opts.damping;
  PartitionMoments m = partition_moments(y, alpha, opts.quadrature);
  double res = residual_inf(y, m);
  bool converged = res <= opts.tolerance;

  for (int it = 0; it < opts.max_iter && !converged; ++it) {
    Point2 next{};
    bool newton_ok = false;
    if (res < 1e-3) {
      // Newton on R(y) = y - G(y), with dG_n/dy_m = 2 alpha_m C_nm.
      const double j11 = 1.0 - 2.0 * alpha.alpha_1 * m.cov_11;
      const double j12 = -2.0 * alpha.alpha_2 * m.cov_12;
      const double j21 = -2.0 * alpha.alpha_1 * m.cov_12;
      const double j22 = 1.0 - 2.0 * alpha.alpha_2 * m.cov_22;
      const double det = j11 * j22 - j12 * j21;
      if (std::abs(det) > 1e-14) {
        const double r1 = y.y1 - m.mean_1, r2 = y.y2 - m.mean_2;
        next = {y.y1 - (j22 * r1 - j12 * r2) / det, y.y2 - (-j21 * r1 + j11 * r2) / det};
        if (std::abs(next.y1) <= 1.0 && std::abs(next.y2) <= 1.0) {
          const PartitionMoments mn = partition_moments(next, alpha, opts.quadrature);
          const double rn = residual_inf(next, mn);
          if (rn < res) {
            y = next;
            m = mn;
            res = rn;
            newton_ok = true;
          }
        }
      }
    }
    if (!newton_ok) {
      y = {(1.0 - lambda) * y.y1 + lambda * m.mean_1, (1.0 - lambda) * y.y2 + lambda * m.mean_2};
      m = partition_moments(y, alpha, opts.quadrature);
      res = residual_inf(y, m);
    }
    converged = res <= opts.tolerance;
  }
  if (!converged) return false;

  // Near a bifurcation the residual is cubic in the distance to the root, so a
  // small residual alone does not pin y. Keep polishing while Newton improves.
  for (int it = 0; it < 100 && res > 1e-15; ++it) {
    const double j11 = 1.0 - 2.0 * alpha.alpha_1 * m.cov_11;
    const double j12 = -2.0 * alpha.alpha_2 * m.cov_12;
    const double j21 = -2.0 * alpha.alpha_1 * m.cov_12;
    const double j22 = 1.0 - 2.0 * alpha.alpha_2 * m.cov_22;
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 1e-300)) break;
    const double r1 = y.y1 - m.mean_1, r2 = y.y2 - m.mean_2;
    const Point2 next{y.y1 - (j22 * r1 - j12 * r2) / det, y.y2 - (-j21 * r1 + j11 * r2) / det};
    if (!(std::abs(next.y1) <= 1.0 && std::abs(next.y2) <= 1.0)) break;
    const PartitionMoments mn = partition_moments(next, alpha, opts.quadrature);
    const double rn = residual_inf(next, mn);
    if (!(rn < res)) break;
    y = next;
    m = mn;
    res = rn;
  }

  out.y_1 = y.y1;
  out.y_2 = y.y2;
  out.g_value = g_from(y, alpha, m);
  out.residual_norm = res;
  out.stability = stability_from(symmetric_eigenvalues(stability_matrix(alpha, m)));
  return true;
}

std::vector<FixedPoint> solve_fixed_points(Couplings alpha, const std::vector<Point2>& seeds,
                                           const SolverOptions& opts, int* dropped) {
  if (seeds.empty()) throw ValidationError("solve_fixed_points needs at least one seed");
  if (!(alpha.alpha_1 >= 0.0) || !(alpha.alpha_2 >= 0.0)) throw ValidationError("alpha_n must be non-negative");
  std::vector<FixedPoint> found;
  int failures = 0;
  for (const Point2& s : seeds) {
    FixedPoint fp;
    if (refine_fixed_point(s, alpha, opts, fp))
      insert_unique(found, fp, opts.dedup_distance);
    else
      ++failures;
  }
  if (dropped) *dropped = failures;
  return found;
}

double nematic_bessel_solve(double alpha_2) {
  if (!(alpha_2 > 1.0)) return 0.0;
  // h(t) = I1(2 a t) / (t I0(2 a t)) - 1 decreases from alpha_2 - 1 > 0 at t = 0
  // to I1(2a)/I0(2a) - 1 < 0 at t = 1.
  auto h = [alpha_2](double t) { return 2.0 * alpha_2 * bessel_ratio_over_x(2.0 * alpha_2 * t) - 1.0; };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double nematic_threshold(double alpha_2, bool negative_branch) {
  const double t = nematic_bessel_solve(alpha_2);
  return negative_branch ? 1.0 / (1.0 - t) : 1.0 / (1.0 + t);
}

Phase label_phase(double y_1, double y_2) {
  const bool zero1 = std::abs(y_1) < kClassificationTolerance;
  const bool zero2 = std::abs(y_2) < kClassificationTolerance;
  if (!zero1) return Phase::ferromagnetic;
  return zero2 ? Phase::paramagnetic : Phase::nematic;
}

PhasePoint classify_phase(Couplings alpha, const Thermo& thermo, const SolverOptions& opts) {
  if (!(thermo.beta > 0.0)) throw ValidationError("beta must be positive");
  int dropped = 0;
  std::vector<FixedPoint> fps = solve_fixed_points(alpha, default_seeds(), opts, &dropped);

  if (opts.grid_scan >= 2) {
    const PeriodicRule& rule = PeriodicRule::power_of_two(opts.scan_log2_nodes);
    const int n = opts.grid_scan;
    Point2 best{};
    double best_g = INFINITY;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Point2 y{-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1)};
        const double g = g_from(y, alpha, evaluate_moments(rule, y, alpha));
        if (g < best_g) {
          best_g = g;
          best = y;
        }
      }
    }
    FixedPoint polished;
    if (refine_fixed_point(best, alpha, opts, polished))
      insert_unique(fps, polished, opts.dedup_distance);
    else
      ++dropped;
  }

  std::vector<FixedPoint> minima;
  for (const auto& fp : fps)
    if (fp.stability == Stability::minimum) minima.push_back(fp);
  if (minima.empty()) throw NonConvergence("no free-energy minimum found");
  std::sort(minima.begin(), minima.end(), by_g_then_position);

  const double g_min = minima.front().g_value;
  const double deg = kDegenerateTolerance * thermo.beta;  // |dF| < tol  <=>  |dg| < tol * beta
  FixedPoint chosen = minima.front();
  int degenerate = 0;
  for (const auto& fp : minima) {
    if (fp.g_value - g_min >= deg) break;
    ++degenerate;
    if (preferred(fp, chosen)) chosen = fp;
  }

  PhasePoint out;
  out.alpha_1 = alpha.alpha_1;
  out.alpha_2 = alpha.alpha_2;
  out.global_min = chosen;
  out.phase = label_phase(chosen.y_1, chosen.y_2);
  out.free_energy = std::log(std::numbers::pi * thermo.hbar * thermo.omega_r * thermo.beta) / (2.0 * thermo.beta) +
                    chosen.g_value / thermo.beta;
  out.all_minima = std::move(minima);
  out.coexistence = degenerate > 1;
  out.dropped_seeds = dropped;
  return out;
}

double canonical_energy_per_particle(double beta, Couplings alpha, const OrderPair& theta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  return 0.5 / beta -
         (alpha.alpha_1 * theta.theta_1 * theta.theta_1 + alpha.alpha_2 * theta.theta_2 * theta.theta_2) / beta;
}

}  // namespace selforg
