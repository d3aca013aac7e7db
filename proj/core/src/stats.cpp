#include "selforg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>
#include <numeric>

#include "selforg/errors.hpp"

namespace selforg {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

BlockingResult blocking_standard_error(std::span<const double> x, std::size_t min_blocks) {
  if (x.size() < std::max<std::size_t>(2, min_blocks))
    throw InsufficientSamples("blocking needs at least " + std::to_string(std::max<std::size_t>(2, min_blocks)) +
                              " samples, got " + std::to_string(x.size()));
  BlockingResult r;
  r.mean = mean(x);
  std::vector<double> blocks(x.begin(), x.end());
  std::size_t size = 1;
  while (blocks.size() >= min_blocks) {
    const double n = static_cast<double>(blocks.size());
    BlockingLevel lvl;
    lvl.block_size = size;
    lvl.n_blocks = blocks.size();
    lvl.standard_error = std::sqrt(variance(blocks) / n);
    lvl.error_of_error = lvl.standard_error / std::sqrt(2.0 * (n - 1.0));
    r.levels.push_back(lvl);
    std::vector<double> next(blocks.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (blocks[2 * i] + blocks[2 * i + 1]);
    blocks = std::move(next);
    size *= 2;
  }
  // Plateau: the first level that no later level exceeds by more than two of
  // that later level's own error bars.
  for (std::size_t l = 0; l + 1 < r.levels.size(); ++l) {
    bool flat = true;
    for (std::size_t m = l + 1; m < r.levels.size() && flat; ++m)
      flat = r.levels[m].standard_error <= r.levels[l].standard_error + 2.0 * r.levels[m].error_of_error;
    if (flat) {
      r.standard_error = r.levels[l].standard_error;
      r.block_size = r.levels[l].block_size;
      r.plateau = true;
      return r;
    }
  }
  const auto best = std::max_element(r.levels.begin(), r.levels.end(),
                                     [](const auto& a, const auto& b) { return a.standard_error < b.standard_error; });
  r.standard_error = best->standard_error;
  r.block_size = best->block_size;
  return r;
}

namespace {

// Unnormalized autocovariance sums c(t) = sum_i d_i d_{i+t} for t < n.
std::vector<double> autocovariance(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  const std::size_t bins = size / 2 + 1;
  double* in = fftw_alloc_real(size);
  fftw_complex* spec = fftw_alloc_complex(bins);
  std::vector<double> c(n);
  {
    // Planning is not thread-safe in FFTW; execution is.
    static std::mutex plan_mutex;
    fftw_plan forward, backward;
    {
      std::lock_guard lock(plan_mutex);
      forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec, in, FFTW_ESTIMATE);
    }
    std::fill(in, in + size, 0.0);
    std::copy(d.begin(), d.end(), in);
    fftw_execute(forward);
    for (std::size_t k = 0; k < bins; ++k) {
      spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
      spec[k][1] = 0.0;
    }
    fftw_execute(backward);
    for (std::size_t t = 0; t < n; ++t) c[t] = in[t] / static_cast<double>(size);
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(in);
  fftw_free(spec);
  return c;
}

}  // namespace

double integrated_autocorrelation_time(std::span<const double> x, double window_factor) {
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientSamples("autocorrelation needs at least 2 samples");
  const double m = mean(x);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - m;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;
  if (c0 <= 0.0) return 0.5;
  const std::vector<double> c = autocovariance(d);
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    tau += c[t] / c0;
    if (static_cast<double>(t) >= window_factor * tau) break;
  }
  return std::max(tau, 0.5);
}

void PowerSums::add(double x) {
  const double x2 = x * x;
  n += 1.0;
  s1 += x;
  s2 += x2;
  s3 += x2 * x;
  s4 += x2 * x2;
}

PowerSums& PowerSums::operator+=(const PowerSums& o) {
  n += o.n;
  s1 += o.s1;
  s2 += o.s2;
  s3 += o.s3;
  s4 += o.s4;
  return *this;
}

namespace {

struct Shape {
  double skew;
  double kurt;
};

Shape shape_of(const PowerSums& s) {
  const double m = s.s1 / s.n;
  const double m2 = s.s2 / s.n - m * m;
  const double m3 = s.s3 / s.n - 3.0 * m * s.s2 / s.n + 2.0 * m * m * m;
  const double m4 = s.s4 / s.n - 4.0 * m * s.s3 / s.n + 6.0 * m * m * s.s2 / s.n - 3.0 * m * m * m * m;
  if (!(m2 > 0.0)) return {0.0, 0.0};
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace

MomentEstimate pooled_moments(std::span<const PowerSums> snapshots, std::size_t n_blocks) {
  if (n_blocks < 2 || snapshots.size() < n_blocks)
    throw InsufficientSamples("moment jackknife needs at least " + std::to_string(n_blocks) + " snapshots");
  std::vector<PowerSums> blocks(n_blocks);
  const std::size_t per = snapshots.size() / n_blocks;
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) blocks[b] += snapshots[i];
  PowerSums total;
  for (const auto& b : blocks) total += b;
  if (total.n < 4.0) throw InsufficientSamples("moment estimate needs at least 4 values");

  MomentEstimate est;
  const Shape full = shape_of(total);
  est.skewness = full.skew;
  est.excess_kurtosis = full.kurt;
  est.count = static_cast<std::size_t>(total.n);

  std::vector<double> skew(n_blocks), kurt(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    PowerSums rest;
    for (std::size_t c = 0; c < n_blocks; ++c)
      if (c != b) rest += blocks[c];
    const Shape s = shape_of(rest);
    skew[b] = s.skew;
    kurt[b] = s.kurt;
  }
  const double k = static_cast<double>(n_blocks);
  auto jack = [k](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt((k - 1.0) / k * s);
  };
  est.skewness_se = jack(skew);
  est.excess_kurtosis_se = jack(kurt);
  return est;
}

}  // namespace selforg
