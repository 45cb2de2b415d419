#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "mfc/parallel.hpp"
#include "mfc/rng.hpp"

using namespace mfc;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams of one seed are distinct and draws are pure") {
  const CounterRng a(7, Stream::brownian), b(7, Stream::initial_law);
  CHECK(a.bits(1, 2, 3) == a.bits(1, 2, 3));
  CHECK(a.bits(1, 2, 3) != b.bits(1, 2, 3));
  CHECK(a.bits(1, 2, 3) != CounterRng(8, Stream::brownian).bits(1, 2, 3));
}

TEST_CASE("uniforms lie in [0,1) and normals have unit moments") {
  const CounterRng rng(42, Stream::sampling);
  const std::size_t n = 200000;
  double s1 = 0.0, s2 = 0.0, u_min = 1.0, u_max = 0.0;
  for (std::uint32_t i = 0; i < n / 2; ++i) {
    const auto [u0, u1] = rng.uniform2(i, 0);
    u_min = std::min({u_min, u0, u1});
    u_max = std::max({u_max, u0, u1});
    const auto [g0, g1] = rng.normal2(i, 1);
    s1 += g0 + g1;
    s2 += g0 * g0 + g1 * g1;
  }
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
  const double mean = s1 / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("parallel_for visits every index once at any thread count") {
  for (std::size_t threads : {1u, 2u, 3u, 8u}) {
    set_thread_count(threads);
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  set_thread_count(1);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  set_thread_count(3);
  CHECK_THROWS(parallel_for(100, [](std::size_t i) {
    if (i == 57) throw std::runtime_error("boom");
  }));
  set_thread_count(1);
}
