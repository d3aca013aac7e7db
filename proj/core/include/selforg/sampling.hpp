#pragma once

// Independent draws of atom phases from the single-particle mean-field
// density rho(q) ~ exp(2 alpha_1 Theta_1 cos q + 2 alpha_2 Theta_2 cos 2q).

#include <cstdint>
#include <vector>

#include "selforg/model.hpp"
#include "selforg/quadrature.hpp"
#include "selforg/rng.hpp"

namespace selforg {

class MeanFieldDensity {
 public:
  MeanFieldDensity(Couplings alpha, OrderPair theta, int table_size = 4096);

  /// Inverse CDF at u in (0, 1), linear within a table cell.
  double quantile(double u) const;

  /// n phases, the i-th drawn from (stream, i).
  std::vector<double> sample(std::size_t n, const CounterRng& rng, std::uint64_t stream) const;

 private:
  std::vector<double> cdf_;  ///< at the table nodes 2 pi k / size, cdf_[0] = 0, cdf_.back() = 1
};

}  // namespace selforg
