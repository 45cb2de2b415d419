#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace mfc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A pure function of (key, counter); there is no hidden state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream tags separate the uses of one user seed so that, say, the initial
/// law and the Brownian increments drawn from the same seed are independent.
enum class Stream : std::uint32_t {
  brownian = 1,
  initial_law = 2,
  projection = 3,
  subsample = 4,
  optimizer = 5,
  sampling = 6,
};

/// Keyed access to independent random streams. draw(i, j) is a pure function
/// of (seed, stream, i, j), which makes every consumer reproducible regardless
/// of evaluation order or thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream) : seed_(seed), stream_(stream) {}

  std::array<std::uint32_t, 4> bits(std::uint32_t index, std::uint32_t a,
                                    std::uint32_t b = 0) const;

  /// Two independent uniforms in [0, 1) with 53 random bits each.
  std::pair<double, double> uniform2(std::uint32_t index, std::uint32_t a,
                                     std::uint32_t b = 0) const;

  /// Two independent standard normals (Box-Muller on uniform2).
  std::pair<double, double> normal2(std::uint32_t index, std::uint32_t a,
                                    std::uint32_t b = 0) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  Stream stream_;
};

}  // namespace mfc
