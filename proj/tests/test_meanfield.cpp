#include <doctest.h>

#include <cmath>

#include "mfc/error.hpp"
#include "mfc/initial_law.hpp"
#include "mfc/meanfield.hpp"

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

// Central differences of psi against its analytic derivatives.
void check_derivatives(const TestFunction& psi, std::vector<double> x, std::vector<double> v) {
  const double h = 1e-5;
  const std::size_t d = x.size();
  std::vector<double> gx(d), gv(d);
  psi.grad_x(x, v, gx);
  psi.grad_v(x, v, gv);
  double lap = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    auto xp = x, xm = x, vp = v, vm = v;
    xp[j] += h;
    xm[j] -= h;
    vp[j] += h;
    vm[j] -= h;
    CHECK(gx[j] == doctest::Approx((psi.value(xp, v) - psi.value(xm, v)) / (2 * h)).epsilon(1e-6).scale(1.0));
    CHECK(gv[j] == doctest::Approx((psi.value(x, vp) - psi.value(x, vm)) / (2 * h)).epsilon(1e-6).scale(1.0));
    lap += (psi.value(x, vp) - 2 * psi.value(x, v) + psi.value(x, vm)) / (h * h);
  }
  CHECK(psi.lap_v(x, v) == doctest::Approx(lap).epsilon(1e-4).scale(1.0));
}

MeasureFlow ballistic_flow(const ParticleEnsemble& init, std::size_t steps) {
  const auto cfg = config(init.size(), steps, 0.0);
  return picard_solve(fields::zero(init.dim()), init, cfg, 1e-12, 3).final_flow;
}

}  // namespace

TEST_CASE("test function derivatives match finite differences") {
  const auto b = test_functions::bump({0.1, -0.2}, {0.3, 0.0}, 1.5);
  check_derivatives(b, {0.4, 0.2}, {-0.1, 0.5});
  check_derivatives(b, {-0.5, -0.3}, {0.8, -0.4});
  const auto xb = test_functions::x_bump({0.5}, 2.0);
  check_derivatives(xb, {1.2}, {3.0});
  CHECK(xb.lap_v(std::vector<double>{1.2}, std::vector<double>{3.0}) == 0.0);
  const auto cb = test_functions::coordinate_bump(2, 1, 0.5, 1.0);
  check_derivatives(cb, {7.0, 0.9}, {1.0, 1.0});
  const auto pl = test_functions::plateau(1, 1.0);
  check_derivatives(pl, {1.1}, {0.6});
  CHECK(pl.value(std::vector<double>{0.5}, std::vector<double>{0.5}) == 1.0);
  CHECK(pl.value(std::vector<double>{2.0}, std::vector<double>{0.1}) == 0.0);
  CHECK(b.value(std::vector<double>{5.0, 0.0}, std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(b.value(std::vector<double>{0.1, -0.2}, std::vector<double>{0.3, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("picard with a measure-independent drift stops after two sweeps") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 40, 3);
  const auto rep = picard_solve(fields::linear_damping(1, 0.5), init, config(40, 20, 0.3), 1e-10, 10);
  CHECK(rep.converged);
  CHECK(rep.iterations == 2);
  CHECK(rep.gaps.back() == 0.0);
}

TEST_CASE("alignment with a common initial velocity is ballistic") {
  const auto init = sample_initial(InitialLaw::gaussian(1, {0.0, 0.7}, {1.0, 0.0}), 6, 2);
  const auto f = fields::kernel_drift(kernels::alignment(), 1);
  const auto rep = picard_solve(f, init, config(6, 10, 0.0), 1e-12, 10);
  CHECK(rep.converged);
  CHECK(rep.gaps.back() == 0.0);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(rep.final_flow.at(10).x(i)[0] == doctest::Approx(init.x(i)[0] + 0.7).epsilon(1e-13));
}

TEST_CASE("two-particle alignment fixed point follows the linear recurrence") {
  const ParticleEnsemble init(1, {0.0, 1.0}, {1.0, -1.0});
  const auto cfg = config(2, 20, 0.0, 1, 0.5);
  const auto rep =
      picard_solve(fields::kernel_drift(kernels::alignment(), 1), init, cfg, 1e-13, 60);
  REQUIRE(rep.converged);
  double rel = 2.0;
  for (std::size_t k = 0; k <= 20; ++k) {
    const auto& e = rep.final_flow.at(k);
    CHECK(e.v(0)[0] + e.v(1)[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(e.v(0)[0] - e.v(1)[0] == doctest::Approx(rel).epsilon(1e-10));
    rel *= 1.0 - cfg.dt();
  }
}

TEST_CASE("picard is deterministic and contracts geometrically") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 64, 5);
  const auto f = fields::kernel_drift(kernels::bounded_alignment(1, 2.0), 1);
  const auto cfg = config(64, 40, 0.1, 7);
  const auto a = picard_solve(f, init, cfg, 1e-10, 40), b = picard_solve(f, init, cfg, 1e-10, 40);
  CHECK(a.gaps == b.gaps);
  REQUIRE(a.converged);
  const std::size_t n = a.gaps.size();
  REQUIRE(n >= 6);
  for (std::size_t k = n - 5; k < n; ++k) CHECK(a.gaps[k] < a.gaps[k - 1]);
  CHECK(a.gaps.back() < 1e-10);

  const auto cut = picard_solve(f, init, cfg, 1e-10, 2);
  CHECK_FALSE(cut.converged);
  CHECK(cut.iterations == 2);
  CHECK_THROWS(picard_solve(f, init, cfg, 0.0, 5));
  CHECK_THROWS(picard_solve(f, sample_initial(InitialLaw::standard_gaussian(1), 3, 1), cfg, 1e-8, 5));
}

TEST_CASE("weak-form residual") {
  const auto init = sample_initial(InitialLaw::gaussian(1, {0.0, 0.0}, {0.1, 0.1}), 50, 4);
  const auto psi0 = test_functions::plateau(1, 10.0);
  const auto flow = ballistic_flow(init, 20);
  CHECK(weakform_residual(flow, fields::zero(1), 0.0, psi0, 20) == 0.0);

  const auto psi = test_functions::x_bump({0.3}, 1.0);
  std::vector<double> res;
  for (std::size_t steps : {40u, 80u, 160u}) {
    res.push_back(weakform_residual(ballistic_flow(init, steps), fields::zero(1), 0.0, psi, steps));
  }
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    CHECK(res[i] / res[i + 1] >= 1.7);
    CHECK(res[i] / res[i + 1] <= 2.3);
  }
  // Flow generated without force, residual evaluated against a constant force.
  const auto wrong = fields::constant({1.0});
  const auto bv = test_functions::bump({0.0}, {0.0}, 1.5);
  const double mismatch = weakform_residual(ballistic_flow(init, 160), wrong, 0.0, bv, 160);
  CHECK(mismatch > 10.0 * weakform_residual(ballistic_flow(init, 160), fields::zero(1), 0.0, bv, 160));

  std::vector<std::size_t> order(50);
  for (std::size_t i = 0; i < 50; ++i) order[i] = (13 * i + 1) % 50;
  std::vector<ParticleEnsemble> snaps;
  for (const auto& s : flow.snapshots()) snaps.push_back(s.permuted(order));
  const MeasureFlow perm(flow.grid(), snaps);
  CHECK(weakform_residual(perm, wrong, 0.2, bv, 15) ==
        doctest::Approx(weakform_residual(flow, wrong, 0.2, bv, 15)).epsilon(1e-12));
  CHECK_THROWS(weakform_residual(flow, wrong, 0.0, bv, 0));
  CHECK_THROWS(weakform_residual(flow, wrong, 0.0, TestFunction{}, 3));
}

TEST_CASE("stability experiment") {
  const auto init = sample_initial(InitialLaw::standard_gaussian(1), 32, 6);
  const auto f = fields::kernel_drift(kernels::bounded_alignment(1), 1);
  const auto cfg = config(32, 20, 0.2, 3);
  PicardOptions opts;
  opts.metric = GapMetric::paired;
  const std::vector<DriftField> same{f, f};
  for (double g : stability_experiment(same, f, init, cfg, 1e-10, 40, opts)) CHECK(g == 0.0);

  std::vector<DriftField> seq;
  for (double j : {1.0, 2.0, 4.0, 8.0}) seq.push_back(fields::perturbed(f, 1.0 / j, 1.0));
  const auto gaps = stability_experiment(seq, fields::perturbed(f, 0.0, 1.0), init, cfg, 1e-10, 40, opts);
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) CHECK(gaps[i] > gaps[i + 1]);

  const std::vector<DriftField> mixed{fields::perturbed(f, 0.1, 0.1), fields::perturbed(f, 0.1, 0.5)};
  CHECK_THROWS(stability_experiment(mixed, f, init, cfg, 1e-10, 40, opts));
  CHECK_THROWS_AS(stability_experiment(same, f, init, cfg, 1e-10, 1, opts), ConvergenceError);
}

TEST_CASE("moment certificate") {
  const ParticleEnsemble origin(1, {0.0}, {0.0});
  const auto c0 = moment_certificate(MeasureFlow::constant(origin, uniform_grid(1.0, 4)), 2.0,
                                     YoungFunction::x_log1p());
  CHECK(c0.sup_moment == 0.0);
  CHECK(c0.sup_young_moment == 0.0);
  CHECK(c0.holder_ratio == 0.0);
  CHECK(c0.pass);

  // One particle x0 = 1, v0 = 2: |z(t)|^2 = (1 + 2t)^2 + 4, largest at t = 1.
  const ParticleEnsemble one(1, {1.0}, {2.0});
  const auto c = moment_certificate(ballistic_flow(one, 10), 2.0, YoungFunction::identity());
  CHECK(c.sup_moment == doctest::Approx(13.0));
  CHECK(c.sup_young_moment == doctest::Approx(13.0));
  // W_2 = 2|t - s|, so the ratio with exponent 1/2 is 2 |t - s|^{1/2} <= 2.
  CHECK(c.holder_ratio == doctest::Approx(2.0));
  CHECK(c.pass);
}
