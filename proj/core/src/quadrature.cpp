#include "selforg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "selforg/errors.hpp"

namespace selforg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sums {
  double max_exponent = 0.0;
  double w = 0.0;
  double w_even = 0.0;
  double c1 = 0.0, c2 = 0.0, c11 = 0.0, c12 = 0.0, c22 = 0.0;
};

Sums accumulate(const PeriodicRule& rule, Point2 y, Couplings alpha, int stride) {
  const double a1 = 2.0 * alpha.alpha_1 * y.y1;
  const double a2 = 2.0 * alpha.alpha_2 * y.y2;
  const auto& cos1 = rule.cos1();
  const auto& cos2 = rule.cos2();
  const int n = rule.size();

  Sums s;
  // The exponent is maximal at q = 0, q = pi or where cos q = -a1 / (4 a2).
  double m = std::max(a1 + a2, -a1 + a2);
  if (a2 < 0.0) {
    const double c = -a1 / (4.0 * a2);
    if (c > -1.0 && c < 1.0) m = std::max(m, a1 * c + a2 * (2.0 * c * c - 1.0));
  }
  s.max_exponent = m;
  for (int j = 0; j < n; j += stride) {
    const double c1 = cos1[j];
    const double c2 = cos2[j];
    const double w = std::exp(a1 * c1 + a2 * c2 - m);
    s.w += w;
    if ((j / stride) % 2 == 0) s.w_even += w;
    s.c1 += w * c1;
    s.c2 += w * c2;
    s.c11 += w * c1 * c1;
    s.c12 += w * c1 * c2;
    s.c22 += w * c2 * c2;
  }
  return s;
}

PartitionMoments finish(const Sums& s, double weight, int nodes) {
  PartitionMoments r;
  r.nodes = nodes;
  r.log_integral = s.max_exponent + std::log(s.w * weight);
  const double inv = 1.0 / s.w;
  r.mean_1 = s.c1 * inv;
  r.mean_2 = s.c2 * inv;
  r.cov_11 = s.c11 * inv - r.mean_1 * r.mean_1;
  r.cov_12 = s.c12 * inv - r.mean_1 * r.mean_2;
  r.cov_22 = s.c22 * inv - r.mean_2 * r.mean_2;
  return r;
}

}  // namespace

PeriodicRule::PeriodicRule(int n_nodes) {
  if (n_nodes < 4) throw ValidationError("quadrature needs at least 4 nodes");
  cos1_.resize(n_nodes);
  cos2_.resize(n_nodes);
  weight_ = kTwoPi / n_nodes;
  for (int j = 0; j < n_nodes; ++j) {
    const double q = kTwoPi * j / n_nodes;
    cos1_[j] = std::cos(q);
    cos2_[j] = std::cos(2.0 * q);
  }
}

const PeriodicRule& PeriodicRule::power_of_two(int log2_nodes) {
  constexpr int kMin = 4, kMax = 16;
  if (log2_nodes < kMin || log2_nodes > kMax) throw ValidationError("unsupported quadrature size");
  // Function-local statics are initialized exactly once, even under concurrency.
  static const auto rules = [] {
    std::array<std::unique_ptr<PeriodicRule>, kMax + 1> r;
    for (int l = kMin; l <= kMax; ++l) r[l] = std::make_unique<PeriodicRule>(1 << l);
    return r;
  }();
  return *rules[log2_nodes];
}

PartitionMoments evaluate_moments(const PeriodicRule& rule, Point2 y, Couplings alpha, int stride) {
  if (stride < 1) throw ValidationError("stride must be positive");
  const Sums s = accumulate(rule, y, alpha, stride);
  const int used = (rule.size() + stride - 1) / stride;
  return finish(s, rule.weight() * stride, used);
}

PartitionMoments partition_moments(Point2 y, Couplings alpha, const QuadratureOptions& opts) {
  PartitionMoments last;
  for (int l = opts.initial_log2_nodes; l <= opts.max_log2_nodes; ++l) {
    const PeriodicRule& rule = PeriodicRule::power_of_two(l);
    const Sums s = accumulate(rule, y, alpha, 1);
    last = finish(s, rule.weight(), rule.size());
    // The even nodes form the rule with half as many points.
    const double full = s.w;
    const double half = 2.0 * s.w_even;
    if (std::abs(full - half) <= opts.rel_tol * full) return last;
  }
  return last;
}

double log_partition_integral(double y1, double y2, double alpha_1, double alpha_2, int n_nodes) {
  if (n_nodes < 16) throw ValidationError("partition integral needs at least 16 nodes");
  const PeriodicRule rule(n_nodes);
  return evaluate_moments(rule, {y1, y2}, {alpha_1, alpha_2}).log_integral;
}

double partition_integral(double y1, double y2, double alpha_1, double alpha_2, int n_nodes) {
  return std::exp(log_partition_integral(y1, y2, alpha_1, alpha_2, n_nodes));
}

std::array<double, 2> moment_integrals(double y1, double y2, double alpha_1, double alpha_2, int n_nodes) {
  if (n_nodes < 16) throw ValidationError("partition integral needs at least 16 nodes");
  const PeriodicRule rule(n_nodes);
  const PartitionMoments m = evaluate_moments(rule, {y1, y2}, {alpha_1, alpha_2});
  const double integral = std::exp(m.log_integral);
  return {m.mean_1 * integral, m.mean_2 * integral};
}

}  // namespace selforg
