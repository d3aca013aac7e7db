#pragma once

// Error bars for correlated time series.

#include <cstddef>
#include <span>
#include <vector>

namespace selforg {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);

struct BlockingLevel {
  std::size_t block_size = 1;
  std::size_t n_blocks = 0;
  double standard_error = 0.0;
  double error_of_error = 0.0;
};

struct BlockingResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t block_size = 1;  ///< level at which the estimate plateaued
  bool plateau = false;        ///< false when no plateau was found and the largest estimate is returned
  std::vector<BlockingLevel> levels;
};

/// Standard error of the mean by repeated pairwise blocking. The plateau is
/// the first level that no later level exceeds by more than two of its error
/// bars. Levels with fewer than `min_blocks` blocks are not considered.
BlockingResult blocking_standard_error(std::span<const double> x, std::size_t min_blocks = 16);

/// Integrated autocorrelation time tau with var(mean) = 2 tau var(x) / n,
/// using a self-consistent window M >= window_factor * tau. Returns 0.5 for
/// uncorrelated data and for constant series.
double integrated_autocorrelation_time(std::span<const double> x, double window_factor = 5.0);

struct MomentEstimate {
  double skewness = 0.0;
  double skewness_se = 0.0;
  double excess_kurtosis = 0.0;
  double excess_kurtosis_se = 0.0;
  std::size_t count = 0;
};

/// Per-snapshot power sums of a sample: n, sum x, sum x^2, sum x^3, sum x^4.
struct PowerSums {
  double n = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;

  void add(double x);
  PowerSums& operator+=(const PowerSums& o);
  bool operator==(const PowerSums&) const = default;
};

/// Pooled skewness and excess kurtosis of all snapshots, with delete-one-block
/// jackknife errors over `n_blocks` contiguous groups of snapshots.
MomentEstimate pooled_moments(std::span<const PowerSums> snapshots, std::size_t n_blocks = 20);

}  // namespace selforg
