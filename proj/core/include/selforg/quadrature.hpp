#pragma once

// Trapezoidal quadrature of the single-particle partition integral
//
//   I(y1, y2) = int_0^{2 pi} dq exp[2 (alpha_1 y1 cos q + alpha_2 y2 cos 2q)]
//
// and the Gibbs moments of cos q, cos 2q under the same weight. The integrand
// is smooth and periodic, so equally spaced nodes converge spectrally. All
// sums are taken relative to the largest exponent, so large couplings never
// overflow.

#include <array>
#include <vector>

namespace selforg {

struct Couplings {
  double alpha_1 = 0.0;
  double alpha_2 = 0.0;
  bool operator==(const Couplings&) const = default;
};

struct Point2 {
  double y1 = 0.0;
  double y2 = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Equally spaced nodes q_j = 2 pi j / n with cached cos q_j and cos 2 q_j.
class PeriodicRule {
 public:
  explicit PeriodicRule(int n_nodes);

  int size() const { return static_cast<int>(cos1_.size()); }
  double weight() const { return weight_; }
  const std::vector<double>& cos1() const { return cos1_; }
  const std::vector<double>& cos2() const { return cos2_; }

  /// Shared immutable rule with 2^log2_nodes nodes, 4 <= log2_nodes <= 16.
  static const PeriodicRule& power_of_two(int log2_nodes);

 private:
  std::vector<double> cos1_;
  std::vector<double> cos2_;
  double weight_;
};

/// Everything the equilibrium solver needs from one pass over the nodes.
struct PartitionMoments {
  double log_integral = 0.0;  ///< ln I
  double mean_1 = 0.0;        ///< <cos q>
  double mean_2 = 0.0;        ///< <cos 2q>
  double cov_11 = 0.0;        ///< covariances of (cos q, cos 2q)
  double cov_12 = 0.0;
  double cov_22 = 0.0;
  int nodes = 0;              ///< nodes used by the accepted estimate
};

/// One fixed-rule evaluation. `stride` > 1 uses every stride-th node only.
PartitionMoments evaluate_moments(const PeriodicRule& rule, Point2 y, Couplings alpha, int stride = 1);

struct QuadratureOptions {
  int initial_log2_nodes = 9;  ///< 512 nodes
  int max_log2_nodes = 16;
  double rel_tol = 1e-12;
};

/// Doubles the node count until the integral at n and n/2 nodes agrees to rel_tol.
PartitionMoments partition_moments(Point2 y, Couplings alpha, const QuadratureOptions& opts = {});

/// I(y1, y2) with an arbitrary node count (n_nodes >= 16). May return +inf
/// for astronomically large exponents; use log_partition_integral there.
double partition_integral(double y1, double y2, double alpha_1, double alpha_2, int n_nodes = 512);
double log_partition_integral(double y1, double y2, double alpha_1, double alpha_2, int n_nodes = 512);

/// int cos(n q) exp[...] dq for n = 1, 2 from the same node evaluations.
std::array<double, 2> moment_integrals(double y1, double y2, double alpha_1, double alpha_2, int n_nodes = 512);

}  // namespace selforg
