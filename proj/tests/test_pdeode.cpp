#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfc/error.hpp"
#include "mfc/initial_law.hpp"
#include "mfc/pdeode.hpp"

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
  return c;
}

MeasureFlow free_flow(const ParticleEnsemble& init, const SimConfig& cfg) {
  const FrozenDrift zero = [](std::size_t, double, auto, auto, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return simulate_frozen(zero, init, cfg, generate_brownian(cfg));
}

LeaderState leaders_at(std::vector<double> y) {
  LeaderState s(y.size(), 1);
  s.y = std::move(y);
  return s;
}

CoupledModel steering_model(double y0) {
  return CoupledModel{fields::kernel_drift(kernels::bounded_alignment(1), 1),
                      leader_coupling_from_kernel(kernels::bounded_attraction()),
                      zero_leader_field(), leaders_at({y0})};
}

// Time-binned control around a constant with a +-amp wiggle per bin.
ControlSpec wiggle(double base, double amp, std::size_t bins) {
  auto u = ControlSpec::sv(1, 1, 1.0, bins, FeatureMap::constant_only(), 2.0);
  std::vector<double> h(bins);
  for (std::size_t b = 0; b < bins; ++b) h[b] = base + (b % 2 ? -amp : amp);
  return u.with_parameters(h);
}

}  // namespace

TEST_CASE("leader ode closed forms") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 10, 1);
  const auto cfg = config(10, 16, 0.0);
  const auto flow = free_flow(init, cfg);
  const auto Y0 = leaders_at({0.5, -1.0});

  const auto still = solve_leader_ode(zero_leader_field(), ControlSpec::zero(2, 1, 1.0), flow, Y0);
  for (const auto& s : still.states) {
    CHECK(s.y == Y0.y);
    CHECK(s.w == std::vector<double>{0.0, 0.0});
  }
  for (auto scheme : {LeaderScheme::euler, LeaderScheme::heun}) {
    const auto lin = solve_leader_ode(zero_leader_field(),
                                      ControlSpec::constant(2, 1, 1.0, {0.3, -2.0}), flow, Y0, scheme);
    for (std::size_t k = 0; k <= 16; ++k) {
      const double t = flow.time(k);
      CHECK(lin.states[k].y[0] == doctest::Approx(0.5 + 0.3 * t).epsilon(1e-13));
      CHECK(lin.states[k].y[1] == doctest::Approx(-1.0 - 2.0 * t).epsilon(1e-13));
      CHECK(lin.states[k].w == std::vector<double>{0.3, -2.0});
    }
  }
}

TEST_CASE("leader attracted to the mean of a ballistic flow") {
  // Y' = xbar(t) - Y with xbar(t) = a + b t:
  // Y(t) = a + b t - b + (Y0 - a + b) e^{-t}.
  const auto init = sample_initial(InitialLaw::gaussian(1, {0.4, 0.8}, {0.5, 0.3}), 20, 2);
  const double a = init.mean_position()[0], b = init.mean_velocity()[0], y0 = -1.0;
  const auto F = leader_field_from_kernels(kernels::attraction(), kernels::zero());
  std::vector<double> err_euler, err_heun;
  for (std::size_t steps : {20u, 40u, 80u}) {
    const auto flow = free_flow(init, config(20, steps, 0.0));
    const double exact = a + b - b + (y0 - a + b) * std::exp(-1.0);
    const auto ctl = ControlSpec::zero(1, 1, 1.0);
    err_euler.push_back(std::abs(
        solve_leader_ode(F, ctl, flow, leaders_at({y0})).states.back().y[0] - exact));
    err_heun.push_back(std::abs(
        solve_leader_ode(F, ctl, flow, leaders_at({y0}), LeaderScheme::heun).states.back().y[0] -
        exact));
  }
  for (std::size_t i = 0; i + 1 < err_euler.size(); ++i) {
    CHECK(err_euler[i] / err_euler[i + 1] == doctest::Approx(2.0).epsilon(0.1));
    CHECK(err_heun[i] / err_heun[i + 1] == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("leader solution is non-anticipative and bounded") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 12, 3);
  const auto cfg = config(12, 10, 0.3);
  const auto flow = free_flow(init, cfg);
  auto snaps = flow.snapshots();
  for (std::size_t k = 6; k < snaps.size(); ++k) snaps[k] = snaps[k].scaled(-4.0);
  const MeasureFlow tail(flow.grid(), snaps);
  const auto F = leader_field_from_kernels(kernels::bounded_attraction(2.0), kernels::bounded_tanh_attraction(1));
  const auto u = ControlSpec::sv(2, 1, 1.0, 4, FeatureMap::standard(1), 1.5)
                     .with_parameters(std::vector<double>(2 * 4 * 4, 0.3));
  const auto Y0 = leaders_at({1.0, -2.0});
  const auto a = solve_leader_ode(F, u, flow, Y0), b = solve_leader_ode(F, u, tail, Y0);
  for (std::size_t k = 0; k <= 6; ++k) CHECK(a.states[k].y == b.states[k].y);
  for (std::size_t k = 0; k < 6; ++k) CHECK(a.states[k].w == b.states[k].w);

  double sup_y = 0.0;
  for (const auto& s : a.states) sup_y = std::max(sup_y, s.norm());
  CHECK(sup_y <= Y0.norm() + 1.0 * (F.K_F * std::sqrt(2.0) + u.M_u()) + 1e-12);
  double sup_m = 0.0;
  for (std::size_t k = 0; k < flow.nodes(); ++k) sup_m = std::max(sup_m, std::sqrt(moment_p(flow.at(k), 2.0)));
  CHECK(sup_y <= leader_growth_constant(F, u, Y0, 1.0) * (1.0 + sup_m));
}

TEST_CASE("combined drift") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 8, 4);
  const auto cfg = config(8, 6, 0.2);
  const auto flow = free_flow(init, cfg);
  const auto v = fields::kernel_drift(kernels::bounded_alignment(1), 1);
  const auto pts = latin_hypercube(10, 1, 2.0, 3);

  const auto same = combined_drift(v, zero_leader_coupling(),
                                   leader_field_from_kernels(kernels::attraction(), kernels::zero()),
                                   ControlSpec::constant(1, 1, 1.0, {1.0}), leaders_at({3.0}), 1.0);
  for (const auto& z : pts)
    for (std::size_t k = 0; k < flow.nodes(); ++k) CHECK(same(flow.view(k), z) == v(flow.view(k), z));

  const auto pull = combined_drift(fields::zero(1), leader_coupling_from_kernel(kernels::attraction()),
                                   zero_leader_field(), ControlSpec::zero(1, 1, 1.0), leaders_at({0.0}), 1.0);
  CHECK(pull(flow.view(3), PhasePoint({1.7}, {0.0}))[0] == doctest::Approx(-1.7));

  // Against solving the leaders first and summing by hand.
  const auto F = leader_field_from_kernels(kernels::bounded_attraction(), kernels::zero());
  const auto w_kernel = kernels::bounded_alignment(1, 0.5);
  const auto u = ControlSpec::constant(2, 1, 1.0, {0.2, -0.1});
  const auto Y0 = leaders_at({1.0, -1.0});
  const auto G = combined_drift(v, leader_coupling_from_kernel(w_kernel), F, u, Y0, 1.0);
  const auto leaders = solve_leader_ode(F, u, flow, Y0);
  for (const auto& z : pts)
    for (std::size_t k : {0u, 2u, 5u, 3u}) {
      const auto got = G(flow.view(k), z);
      const auto base = v(flow.view(k), z);
      const auto coupling = leader_coupling_drift(w_kernel, leaders.states[k], z);
      CHECK(got[0] == doctest::Approx(base[0] + coupling[0]).epsilon(1e-14));
    }
  CHECK(G.constants().K > v.constants().K);
}

TEST_CASE("coupled solver degenerate cases") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 16, 5);
  const auto cfg = config(16, 20, 0.2, 9);
  CoupledModel model{fields::zero(1), zero_leader_coupling(),
                     leader_field_from_kernels(kernels::bounded_attraction(), kernels::zero()),
                     leaders_at({2.0})};
  const auto u = ControlSpec::constant(1, 1, 1.0, {0.5});
  const auto sol = solve_coupled(model, u, init, cfg, 1e-10, 10);
  CHECK(sol.picard.converged);
  CHECK(sol.picard.iterations == 2);
  const auto alone = free_flow(init, cfg);
  for (std::size_t k = 0; k < alone.nodes(); ++k) CHECK(sol.flow.at(k) == alone.at(k));
  const auto direct = solve_leader_ode(model.F, u, alone, model.Y0);
  for (std::size_t k = 0; k < alone.nodes(); ++k) CHECK(sol.leaders.states[k].y == direct.states[k].y);

  CoupledModel fixed{fields::linear_damping(1, 0.5), leader_coupling_from_kernel(kernels::bounded_attraction()),
                     zero_leader_field(), leaders_at({1.0})};
  const auto s2 = solve_coupled(fixed, u, init, cfg, 1e-10, 10);
  CHECK(s2.picard.converged);
  CHECK(s2.picard.iterations == 2);
}

TEST_CASE("followers ignore leaders without coupling") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 16, 6);
  const auto cfg = config(16, 20, 0.3, 2);
  const auto v = fields::kernel_drift(kernels::bounded_alignment(1), 1);
  const auto a = solve_coupled(CoupledModel{v, zero_leader_coupling(), zero_leader_field(), leaders_at({0.0})},
                               ControlSpec::zero(1, 1, 1.0), init, cfg, 1e-10, 40);
  const auto b = solve_coupled(
      CoupledModel{v, zero_leader_coupling(),
                   leader_field_from_kernels(kernels::bounded_attraction(), kernels::zero()),
                   leaders_at({4.0, -3.0})},
      ControlSpec::constant(2, 1, 1.0, {1.0, 2.0}), init, cfg, 1e-10, 40);
  for (std::size_t k = 0; k < a.flow.nodes(); ++k) CHECK(a.flow.at(k) == b.flow.at(k));
}

TEST_CASE("a leader pulls the followers toward itself") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto init = sample_initial(InitialLaw::standard_gaussian(1), 24, seed);
    const auto cfg = config(24, 20, 0.1, seed);
    const auto base = solve_coupled(
        CoupledModel{fields::kernel_drift(kernels::bounded_alignment(1), 1), zero_leader_coupling(),
                     zero_leader_field(), leaders_at({0.0})},
        ControlSpec::zero(1, 1, 1.0), init, cfg, 1e-10, 40);
    for (double y0 : {3.0, -3.0}) {
      const auto sol = solve_coupled(steering_model(y0), ControlSpec::zero(1, 1, 1.0), init, cfg, 1e-10, 40);
      REQUIRE(sol.picard.converged);
      const double shift = sol.flow.at(20).mean_position()[0] - base.flow.at(20).mean_position()[0];
      CHECK(shift * y0 > 0.0);
    }
  }
}

TEST_CASE("control stability") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 24, 7);
  const auto cfg = config(24, 16, 0.2, 4);
  auto model = steering_model(1.0);
  model.F = leader_field_from_kernels(kernels::bounded_attraction(), kernels::zero());
  const auto u = wiggle(0.5, 0.0, 4);
  for (const auto& g : control_stability({u, u}, u, model, init, cfg, 1e-10, 40)) CHECK(g.total() == 0.0);

  std::vector<ControlSpec> seq;
  for (double j : {1.0, 2.0, 4.0, 8.0}) seq.push_back(wiggle(0.5, 0.5 / j, 4));
  const auto gaps = control_stability(seq, u, model, init, cfg, 1e-10, 40);
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    CHECK(gaps[i].total() > gaps[i + 1].total());
    CHECK(gaps[i].leader_gap > 0.0);
  }
  auto other = u;
  other.M_h = 5.0;
  CHECK_THROWS(control_stability({other}, u, model, init, cfg, 1e-10, 40));
}

TEST_CASE("leader map is Lipschitz in the flow with a step-stable constant") {
  const auto F = leader_field_from_kernels(kernels::bounded_attraction(), kernels::zero());
  const auto u = ControlSpec::sv(1, 1, 1.0, 2, FeatureMap::standard(1), 1.0)
                     .with_parameters(std::vector<double>{0.2, 0.5, -0.3, 0.1, 0.4, 0.3, 0.2, -0.2});
  auto fitted = [&](std::size_t steps) {
    double C = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s) {
      const auto a = free_flow(sample_initial(InitialLaw::standard_gaussian(1), 12, 10 + s), config(12, steps, 0.1, s));
      const auto b = free_flow(sample_initial(InitialLaw::standard_gaussian(1), 12, 40 + s), config(12, steps, 0.1, s + 100));
      const double dist = sup_flow_distance(a, b, 2.0, GapMetric::exact);
      const double dy = leader_distance(solve_leader_ode(F, u, a, leaders_at({0.5})),
                                        solve_leader_ode(F, u, b, leaders_at({0.5})));
      C = std::max(C, dy / dist);
    }
    return C;
  };
  const double c1 = fitted(20), c2 = fitted(40);
  CHECK(c1 > 0.0);
  CHECK(c2 / c1 < 2.0);
  CHECK(c1 / c2 < 2.0);
}
