#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, index), so a trajectory's noise does not depend on the order
// in which anything else consumes randomness.

#include <array>
#include <cstdint>

namespace selforg {

/// Philox4x32 with 10 rounds.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter counter) const;

 private:
  Key key_;
};

/// Uniform and Gaussian variates addressed by a 64-bit stream tag and a
/// 64-bit index within the stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : philox_(seed) {}

  /// Two uniforms in the open interval (0, 1), 53-bit resolution.
  std::array<double, 2> uniforms(std::uint64_t stream, std::uint64_t index) const;
  /// Two independent standard normals (Box-Muller on uniforms()).
  std::array<double, 2> normals(std::uint64_t stream, std::uint64_t index) const;

  double uniform(std::uint64_t stream, std::uint64_t index) const { return uniforms(stream, index)[0]; }
  double normal(std::uint64_t stream, std::uint64_t index) const { return normals(stream, index)[0]; }

 private:
  Philox4x32 philox_;
};

}  // namespace selforg
