#include "selforg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selforg/errors.hpp"

namespace selforg {

MeanFieldDensity::MeanFieldDensity(Couplings alpha, OrderPair theta, int table_size) {
  if (table_size < 16) throw ValidationError("density table needs at least 16 cells");
  const double b1 = 2.0 * alpha.alpha_1 * theta.theta_1;
  const double b2 = 2.0 * alpha.alpha_2 * theta.theta_2;
  const double top = std::abs(b1) + std::abs(b2);
  const double h = 2.0 * std::numbers::pi / table_size;
  // Cell integrals by Simpson's rule on the log-shifted density.
  auto rho = [&](double q) { return std::exp(b1 * std::cos(q) + b2 * std::cos(2.0 * q) - top); };
  cdf_.assign(static_cast<std::size_t>(table_size) + 1, 0.0);
  for (int k = 0; k < table_size; ++k) {
    const double a = k * h;
    cdf_[k + 1] = cdf_[k] + h / 6.0 * (rho(a) + 4.0 * rho(a + 0.5 * h) + rho(a + h));
  }
  const double total = cdf_.back();
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("mean-field density is not normalizable");
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double MeanFieldDensity::quantile(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), 1, cdf_.size() - 1) - 1;
  const double width = cdf_[k + 1] - cdf_[k];
  const double frac = width > 0.0 ? (u - cdf_[k]) / width : 0.5;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(cdf_.size() - 1);
  return wrap_phase((static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * h);
}

std::vector<double> MeanFieldDensity::sample(std::size_t n, const CounterRng& rng, std::uint64_t stream) const {
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = quantile(rng.uniform(stream, i));
  return q;
}

}  // namespace selforg
