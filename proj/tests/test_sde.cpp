#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfc/error.hpp"
#include "mfc/initial_law.hpp"
#include "mfc/parallel.hpp"
#include "mfc/sde.hpp"

using namespace mfc;

namespace {

SimConfig config(std::size_t N, std::size_t steps, double sigma, std::uint64_t seed = 1,
                 double T = 1.0) {
  SimConfig c;
  c.T = T;
  c.n_steps = steps;
  c.N = N;
  c.sigma = sigma;
  c.seed = seed;
  c.d = 1;
  return c;
}

FrozenDrift constant_drift(double a) {
  return [a](std::size_t, double, auto, auto, std::span<double> out) {
    std::fill(out.begin(), out.end(), a);
  };
}

// Kolmogorov-Smirnov statistic against the standard normal.
double ks_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = double(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    d = std::max({d, cdf - i / n, (i + 1) / n - cdf});
  }
  return d;
}

}  // namespace

TEST_CASE("sim config validation") {
  CHECK_NOTHROW(config(1, 1, 0.0).validate());
  CHECK_THROWS_WITH(config(1, 1, -1.0).validate(), doctest::Contains("sigma must be >= 0"));
  CHECK_THROWS(config(1, 0, 0.0).validate());
  CHECK_THROWS(config(0, 1, 0.0).validate());
  CHECK_THROWS(config(1, 1, 0.0, 1, 0.0).validate());
}

TEST_CASE("brownian paths are reproducible and prefix stable") {
  const auto a = generate_brownian(config(10, 20, 1.0, 9));
  const auto b = generate_brownian(config(10, 20, 1.0, 9));
  const auto c = generate_brownian(config(20, 20, 1.0, 9));
  CHECK(a.data() == b.data());
  for (std::size_t k = 0; k < 20; ++k)
    for (std::size_t i = 0; i < 10; ++i) CHECK(a.increment(k, i)[0] == c.increment(k, i)[0]);
  CHECK(a.data() != generate_brownian(config(10, 20, 1.0, 10)).data());
}

TEST_CASE("brownian increments have the Gaussian moments") {
  auto cfg = config(1000, 100, 1.0, 3);
  const auto paths = generate_brownian(cfg);
  const double dt = cfg.dt(), n = double(paths.data().size());
  double s1 = 0.0, s2 = 0.0;
  for (double e : paths.data()) s1 += e, s2 += e * e;
  const double mean = s1 / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n) * std::sqrt(dt));
  CHECK(std::abs(var - dt) < 0.05 * dt);
}

TEST_CASE("ballistic motion is exact") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 6, 2);
  const auto cfg = config(6, 37, 0.0);
  const auto flow = simulate_frozen(constant_drift(0.0), init, cfg, generate_brownian(cfg));
  CHECK(flow.nodes() == 38);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(flow.at(37).v(i)[0] == init.v(i)[0]);
    CHECK(flow.at(37).x(i)[0] == doctest::Approx(init.x(i)[0] + init.v(i)[0]).epsilon(1e-13));
  }
}

TEST_CASE("constant force: exact velocity, first-order positions") {
  const double a = 1.3, x0 = 0.2, v0 = -0.4;
  const ParticleEnsemble init(1, {x0}, {v0});
  std::vector<double> err;
  for (std::size_t steps : {50u, 100u, 200u, 400u}) {
    const auto cfg = config(1, steps, 0.0);
    const auto flow = simulate_frozen(constant_drift(a), init, cfg, generate_brownian(cfg));
    CHECK(flow.at(steps).v(0)[0] == doctest::Approx(v0 + a).epsilon(1e-12));
    err.push_back(std::abs(flow.at(steps).x(0)[0] - (x0 + v0 + 0.5 * a)));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double ratio = err[i] / err[i + 1];
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
  }
}

TEST_CASE("velocity law under zero force is exactly Gaussian") {
  const double sigma = 0.7;
  const std::size_t n = 10000;
  const auto init = sample_initial(InitialLaw::point(1, {0.0, 0.5}), n, 1);
  const auto cfg = config(n, 10, sigma, 3);
  const auto flow = simulate_frozen(constant_drift(0.0), init, cfg, generate_brownian(cfg));
  for (std::size_t k : {3u, 10u}) {
    const double var_exact = 2.0 * sigma * flow.time(k);
    std::vector<double> z(n);
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = flow.at(k).v(i)[0] - 0.5;
      z[i] = dv / std::sqrt(var_exact);
      s2 += dv * dv;
      s4 += dv * dv * dv * dv;
    }
    const double var = s2 / n, se = std::sqrt((s4 / n - var * var) / n);
    CHECK(std::abs(var - var_exact) <= 3.0 * se);
    CHECK(ks_normal(z) < 1.628 / std::sqrt(double(n)));
  }
}

TEST_CASE("interacting system degeneracies") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 5, 4);
  LeaderState leaders(2, 1);
  leaders.y = {1.0, -1.0};
  const auto cfg = config(5, 20, 0.0);
  const auto paths = generate_brownian(cfg);
  const auto run = simulate_interacting(KernelSet{}, ControlSpec::zero(2, 1, 1.0), init, leaders,
                                        cfg, paths);
  const auto ballistic = simulate_frozen(constant_drift(0.0), init, cfg, paths);
  for (std::size_t k = 0; k <= 20; ++k) {
    CHECK(run.flow.at(k) == ballistic.at(k));
    CHECK(run.leaders.states[k].y == leaders.y);
    CHECK(run.leaders.states[k].w == std::vector<double>{0.0, 0.0});
  }

  KernelSet align;
  align.k11 = kernels::alignment();
  const auto one = sample_initial(InitialLaw::standard_gaussian(1), 1, 4);
  const auto cfg1 = config(1, 20, 0.3);
  const auto paths1 = generate_brownian(cfg1);
  const auto single = simulate_interacting(align, ControlSpec::zero(0, 1, 1.0), one,
                                           LeaderState(0, 1), cfg1, paths1);
  const auto free = simulate_frozen(constant_drift(0.0), one, cfg1, paths1);
  for (std::size_t k = 0; k <= 20; ++k) CHECK(single.flow.at(k) == free.at(k));
}

TEST_CASE("two-particle alignment recurrence") {
  const ParticleEnsemble init(1, {0.0, 1.0}, {1.0, -0.5});
  const std::size_t steps = 40;
  const auto cfg = config(2, steps, 0.0);
  KernelSet k;
  k.k11 = kernels::alignment();
  const auto run = simulate_interacting(k, ControlSpec::zero(0, 1, 1.0), init, LeaderState(0, 1),
                                        cfg, generate_brownian(cfg));
  double rel = 1.5;
  for (std::size_t s = 0; s <= steps; ++s) {
    const auto& e = run.flow.at(s);
    CHECK(0.5 * (e.v(0)[0] + e.v(1)[0]) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e.v(0)[0] - e.v(1)[0] == doctest::Approx(rel).epsilon(1e-12));
    rel *= 1.0 - cfg.dt();
  }
}

TEST_CASE("alignment keeps the mean velocity up to the noise") {
  const double sigma = 0.4;
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 8, 5);
  const auto cfg = config(8, 30, sigma, 2);
  const auto paths = generate_brownian(cfg);
  KernelSet k;
  k.k11 = kernels::alignment(0.8);
  const auto run = simulate_interacting(k, ControlSpec::zero(0, 1, 1.0), init, LeaderState(0, 1),
                                        cfg, paths);
  double noise = 0.0, v0 = 0.0;
  for (std::size_t i = 0; i < 8; ++i) v0 += init.v(i)[0] / 8;
  for (std::size_t s = 0; s <= 30; ++s) {
    double mv = 0.0;
    for (std::size_t i = 0; i < 8; ++i) mv += run.flow.at(s).v(i)[0] / 8;
    CHECK(mv == doctest::Approx(v0 + std::sqrt(2 * sigma) * noise).epsilon(1e-11));
    if (s < 30)
      for (std::size_t i = 0; i < 8; ++i) noise += paths.increment(s, i)[0] / 8;
  }
}

TEST_CASE("leaders with zero coupling do not touch followers") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 6, 8);
  const auto cfg = config(6, 25, 0.2, 4);
  const auto paths = generate_brownian(cfg);
  KernelSet k;
  k.k11 = kernels::bounded_alignment(1);
  k.k21 = kernels::bounded_attraction();
  const auto alone = simulate_interacting(k, ControlSpec::zero(0, 1, 1.0), init,
                                          LeaderState(0, 1), cfg, paths);
  LeaderState leaders(3, 1);
  leaders.y = {2.0, 0.0, -3.0};
  const auto with = simulate_interacting(
      k, ControlSpec::constant(3, 1, 1.0, {0.5, 0.5, 0.5}, 1.0), init, leaders, cfg, paths);
  for (std::size_t s = 0; s <= 25; ++s) CHECK(with.flow.at(s) == alone.flow.at(s));
  CHECK(with.leaders.states.back().y != leaders.y);
}

TEST_CASE("simulation is independent of the thread count") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(2), 30, 8);
  auto cfg = config(30, 15, 0.3, 6);
  cfg.d = 2;
  const auto paths = generate_brownian(cfg);
  KernelSet k;
  k.k11 = kernels::bounded_alignment(2);
  set_thread_count(1);
  const auto a = simulate_interacting(k, ControlSpec::zero(0, 2, 1.0), init, LeaderState(0, 2),
                                      cfg, paths);
  set_thread_count(4);
  const auto b = simulate_interacting(k, ControlSpec::zero(0, 2, 1.0), init, LeaderState(0, 2),
                                      cfg, paths);
  set_thread_count(1);
  for (std::size_t s = 0; s <= 15; ++s) CHECK(a.flow.at(s) == b.flow.at(s));
}

TEST_CASE("non-finite drift is reported") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 3, 1);
  const auto cfg = config(3, 5, 0.0);
  const FrozenDrift bad = [](std::size_t k, double, auto, auto, std::span<double> out) {
    out[0] = k == 2 ? NAN : 0.0;
  };
  CHECK_THROWS_WITH(simulate_frozen(bad, init, cfg, generate_brownian(cfg)),
                    doctest::Contains("step 2"));
}

TEST_CASE("doob bound and check") {
  CHECK(doob_bound(2.0, 1.0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_THROWS(doob_check(1.0, 1.0, 10, 10, 1));
  const auto r = doob_check(2.0, 1.0, 4000, 200, 3);
  CHECK(r.pass);
  CHECK(r.estimate <= 4.0 + 3.0 * r.std_error);
  CHECK(doob_check(4.0, 2.0, 2000, 200, 5).pass);

  const auto single = doob_check(3.0, 1.0, 1, 50, 9);
  double b = 0.0, best = 0.0, db = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    brownian_increment(9, 0, k, 1.0 / 50, std::span<double>(&db, 1));
    b += db;
    best = std::max(best, std::abs(b));
  }
  CHECK(single.estimate == std::pow(best, 3.0));
}
