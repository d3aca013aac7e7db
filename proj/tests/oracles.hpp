#pragma once

// Reference evaluations used only by the tests. Nothing here calls into the
// library, so agreement with it is a genuine cross-check.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// I_0(x) from its power series; accurate to rounding for |x| <= 20.
inline double bessel_i0_series(double x) {
  const double h = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= h / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

/// int_0^{2 pi} exp[2 (a1 y1 cos q + a2 y2 cos 2q)] cos(n q)^power dq by composite
/// Simpson on `intervals` (even) panels.
inline double simpson_moment(double y1, double y2, double a1, double a2, int n, int power, int intervals = 20000) {
  const double h = 2.0 * kPi / intervals;
  double s = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double q = i * h;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(2.0 * (a1 * y1 * std::cos(q) + a2 * y2 * std::cos(2.0 * q))) * std::pow(std::cos(n * q), power);
  }
  return s * h / 3.0;
}

/// g(y) = a1 y1^2 + a2 y2^2 - ln I, with I by Simpson.
inline double g_simpson(double y1, double y2, double a1, double a2, int intervals = 4000) {
  return a1 * y1 * y1 + a2 * y2 * y2 - std::log(simpson_moment(y1, y2, a1, a2, 1, 0, intervals));
}

struct ScanMin {
  double y1 = 0.0, y2 = 0.0, g = 0.0;
};

/// Exhaustive grid scan of g over [-1, 1]^2 with n points per axis.
inline ScanMin grid_scan_min(double a1, double a2, int n = 201, int intervals = 2000) {
  ScanMin best{0.0, 0.0, INFINITY};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double y1 = -1.0 + 2.0 * i / (n - 1), y2 = -1.0 + 2.0 * j / (n - 1);
      const double g = g_simpson(y1, y2, a1, a2, intervals);
      if (g < best.g) best = {y1, y2, g};
    }
  return best;
}

/// Positive root of t = I_1(2 a2 t) / I_0(2 a2 t) by bisection on [1e-6, 1];
/// zero when no sign change exists.
inline double nematic_root(double a2) {
  auto f = [a2](double t) {
    const double x = 2.0 * a2 * t;
    return t - std::cyl_bessel_i(1.0, x) / std::cyl_bessel_i(0.0, x);
  };
  double lo = 1e-6, hi = 1.0;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// H from the pair double sum,
/// sum p^2/2m - (1/2N) sum_ij sum_n gamma_n [cos n(q_i - q_j) + cos n(q_i + q_j)].
inline double pair_energy(const std::vector<double>& q, const std::vector<double>& p, double g1, double g2,
                          double mass = 1.0) {
  const double n_atoms = static_cast<double>(q.size());
  double kin = 0.0, pot = 0.0;
  for (double pi : p) kin += pi * pi / (2.0 * mass);
  for (double qi : q)
    for (double qj : q)
      for (int n = 1; n <= 2; ++n)
        pot += (n == 1 ? g1 : g2) * (std::cos(n * (qi - qj)) + std::cos(n * (qi + qj)));
  return kin - pot / (2.0 * n_atoms);
}

/// -dH/dx_i from differentiating the pair sum, with q = k1 x.
inline std::vector<double> pair_force(const std::vector<double>& q, double g1, double g2, double k1 = 0.5) {
  const double n_atoms = static_cast<double>(q.size());
  std::vector<double> f(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double s = 0.0;
    for (double qj : q)
      for (int n = 1; n <= 2; ++n)
        s += (n == 1 ? g1 : g2) * n * (std::sin(n * (q[i] - qj)) + std::sin(n * (q[i] + qj)));
    f[i] = -k1 * s / n_atoms;
  }
  return f;
}

/// Friction drift sum_n Gamma_n sin(k_n x_i) sum_j sin(k_n x_j) p_j as a double loop.
inline std::vector<double> pair_friction(const std::vector<double>& q, const std::vector<double>& p, double g1,
                                         double g2) {
  std::vector<double> f(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      for (int n = 1; n <= 2; ++n) f[i] += (n == 1 ? g1 : g2) * std::sin(n * q[i]) * std::sin(n * q[j]) * p[j];
  return f;
}

/// Ornstein-Uhlenbeck du = -lambda u dt + sqrt(2 d) dW after time t from u0.
struct OuMoments {
  double mean, variance;
};
inline OuMoments ou_moments(double u0, double lambda, double d, double t) {
  return {u0 * std::exp(-lambda * t), d / lambda * (1.0 - std::exp(-2.0 * lambda * t))};
}

/// Negative root delta_2 of delta_2 / (delta_2^2 + kappa_2^2) = r (r < 0), the
/// larger-magnitude one when `far`. Requires 2 |r| kappa_2 <= 1.
inline double matching_detuning(double r, double kappa_2, bool far) {
  const double disc = std::sqrt(1.0 - 4.0 * r * r * kappa_2 * kappa_2);
  // Roots of r x^2 - x + r kappa^2 multiply to kappa^2; the near root is taken
  // from that product to avoid cancellation in 1 - disc.
  const double far_root = (1.0 + disc) / (2.0 * r);
  return far ? far_root : kappa_2 * kappa_2 / far_root;
}

}  // namespace oracle
