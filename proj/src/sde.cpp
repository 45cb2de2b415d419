#include "mfc/sde.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfc/error.hpp"
#include "mfc/parallel.hpp"
#include "mfc/rng.hpp"

namespace mfc {

void SimConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error("T must be > 0");
  if (n_steps < 1) throw Error("n_steps must be >= 1");
  if (N < 1) throw Error("N must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error("sigma must be >= 0");
  if (d < 1) throw Error("d must be >= 1");
}

void brownian_increment(std::uint64_t seed, std::size_t path, std::size_t step, double dt,
                        std::span<double> out) {
  const CounterRng rng(seed, Stream::brownian);
  const double scale = std::sqrt(dt);
  const std::size_t d = out.size();
  for (std::size_t j = 0; j < d; j += 2) {
    const auto [g0, g1] = rng.normal2(static_cast<std::uint32_t>(path),
                                      static_cast<std::uint32_t>(step),
                                      static_cast<std::uint32_t>(j / 2));
    out[j] = scale * g0;
    if (j + 1 < d) out[j + 1] = scale * g1;
  }
}

BrownianPaths::BrownianPaths(std::size_t n_steps, std::size_t n_paths, std::size_t dim,
                             double dt, std::uint64_t seed)
    : n_steps_(n_steps), n_paths_(n_paths), dim_(dim), dt_(dt), seed_(seed),
      data_(n_steps * n_paths * dim) {
  parallel_for(n_paths_, [&](std::size_t i) {
    for (std::size_t k = 0; k < n_steps_; ++k)
      brownian_increment(seed_, i, k, dt_,
                         std::span<double>(data_.data() + (k * n_paths_ + i) * dim_, dim_));
  });
}

BrownianPaths generate_brownian(const SimConfig& cfg) {
  cfg.validate();
  return BrownianPaths(cfg.n_steps, cfg.N, cfg.d, cfg.dt(), cfg.seed);
}

namespace {

void check_shapes(const ParticleEnsemble& init, const SimConfig& cfg, const BrownianPaths& paths) {
  cfg.validate();
  if (init.size() != cfg.N) throw Error("initial ensemble size differs from N");
  if (init.dim() != cfg.d) throw Error("initial ensemble dimension differs from d");
  if (paths.n_steps() != cfg.n_steps || paths.n_paths() < cfg.N || paths.dim() != cfg.d)
    throw Error("Brownian paths are not shaped for this configuration");
  if (paths.dt() != cfg.dt()) throw Error("Brownian paths use a different time step");
}

void step_error(const char* what, std::size_t k, std::size_t i) {
  throw Error(std::string(what) + " at step " + std::to_string(k) + ", particle " +
              std::to_string(i));
}

// Advances every particle one kinetic Euler step given its drift.
template <class DriftAt>
ParticleEnsemble advance(const ParticleEnsemble& cur, std::size_t k, double dt, double noise,
                         const BrownianPaths& paths, DriftAt&& drift_at) {
  const std::size_t n = cur.size(), d = cur.dim();
  std::vector<double> xs(n * d), vs(n * d);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> f(d);
    drift_at(i, f);
    const auto x = cur.x(i), v = cur.v(i);
    const auto db = paths.increment(k, i);
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(f[j])) step_error("non-finite drift", k, i);
      const double vn = v[j] + f[j] * dt + noise * db[j];
      const double xn = x[j] + vn * dt;
      if (!std::isfinite(vn) || !std::isfinite(xn)) step_error("non-finite state", k, i);
      vs[i * d + j] = vn;
      xs[i * d + j] = xn;
    }
  });
  return ParticleEnsemble(d, std::move(xs), std::move(vs));
}

}  // namespace

MeasureFlow simulate_frozen(const FrozenDrift& F, const ParticleEnsemble& init,
                            const SimConfig& cfg, const BrownianPaths& paths) {
  check_shapes(init, cfg, paths);
  auto grid = cfg.grid();
  const double dt = cfg.dt(), noise = std::sqrt(2.0 * cfg.sigma);
  std::vector<ParticleEnsemble> snaps;
  snaps.reserve(cfg.n_steps + 1);
  snaps.push_back(init);
  for (std::size_t k = 0; k < cfg.n_steps; ++k) {
    const ParticleEnsemble& cur = snaps.back();
    const double t = grid[k];
    snaps.push_back(advance(cur, k, dt, noise, paths, [&](std::size_t i, std::span<double> f) {
      F(k, t, cur.x(i), cur.v(i), f);
    }));
  }
  return MeasureFlow(std::move(grid), std::move(snaps));
}

InteractingRun simulate_interacting(const KernelSet& ks, const ControlSpec& u,
                                    const ParticleEnsemble& init, const LeaderState& leaders,
                                    const SimConfig& cfg, const BrownianPaths& paths) {
  check_shapes(init, cfg, paths);
  const std::size_t m = leaders.m, d = cfg.d;
  if (m > 0 && leaders.d != d) throw Error("leader dimension differs from d");
  if (u.m > 0 && (u.m != m || u.d != d))
    throw Error("control shape does not match the leaders");
  auto grid = cfg.grid();
  const double dt = cfg.dt(), noise = std::sqrt(2.0 * cfg.sigma);
  const LeaderField F = leader_field_from_kernels(ks.k21, ks.k22);

  std::vector<ParticleEnsemble> snaps;
  snaps.reserve(cfg.n_steps + 1);
  snaps.push_back(init);
  std::vector<LeaderState> states;
  states.reserve(cfg.n_steps + 1);
  states.emplace_back(d, leaders.y, std::vector<double>{});
  states.back().m = m;

  std::vector<double> rhs(m * d), uval(m * d);
  auto leader_rhs = [&](std::size_t k) {
    if (m == 0) return;
    const FlowView view(grid, snaps, k);
    F.eval(view, std::span<const LeaderState>(states.data(), k + 1), rhs);
    if (u.m > 0) {
      evaluate_control_into(u, view, uval);
      for (std::size_t j = 0; j < m * d; ++j) rhs[j] += uval[j];
    }
    for (std::size_t j = 0; j < m * d; ++j)
      if (!std::isfinite(rhs[j])) throw Error("non-finite leader velocity at step " + std::to_string(k));
    states[k].w = rhs;
  };

  for (std::size_t k = 0; k < cfg.n_steps; ++k) {
    leader_rhs(k);
    const ParticleEnsemble& cur = snaps.back();
    const LeaderState& lead = states[k];
    snaps.push_back(advance(cur, k, dt, noise, paths, [&](std::size_t i, std::span<double> f) {
      kernel_convolution_into(ks.k11, cur, cur.x(i), cur.v(i), f);
      if (m == 0 || ks.k12.is_zero) return;
      std::vector<double> extra(d);
      leader_coupling_into(ks.k12, lead, cur.x(i), cur.v(i), extra);
      for (std::size_t j = 0; j < d; ++j) f[j] += extra[j];
    }));
    LeaderState next = lead;
    for (std::size_t j = 0; j < m * d; ++j) next.y[j] = lead.y[j] + dt * lead.w[j];
    std::fill(next.w.begin(), next.w.end(), 0.0);
    states.push_back(std::move(next));
  }
  leader_rhs(cfg.n_steps);
  LeaderTrajectory traj{grid, std::move(states)};
  return {MeasureFlow(std::move(grid), std::move(snaps)), std::move(traj)};
}

double doob_bound(double p, double T) {
  if (!(p > 1.0)) throw Error("doob bound requires p > 1");
  if (!(T > 0.0)) throw Error("doob bound requires T > 0");
  return std::pow(2.0 * p * std::sqrt(T) / (p - 1.0), p) * std::tgamma((p + 1.0) / 2.0) /
         std::sqrt(std::numbers::pi);
}

DoobResult doob_check(double p, double T, std::size_t n_paths, std::size_t n_steps,
                      std::uint64_t seed) {
  DoobResult r;
  r.bound = doob_bound(p, T);
  if (n_paths == 0 || n_steps == 0) throw Error("doob check needs paths and steps");
  const double dt = T / static_cast<double>(n_steps);
  std::vector<double> sup_pow(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    double b = 0.0, best = 0.0, db = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      brownian_increment(seed, i, k, dt, std::span<double>(&db, 1));
      b += db;
      best = std::max(best, std::abs(b));
    }
    sup_pow[i] = std::pow(best, p);
  });
  double mean = 0.0;
  for (double s : sup_pow) mean += s;
  mean /= static_cast<double>(n_paths);
  double var = 0.0;
  for (double s : sup_pow) var += (s - mean) * (s - mean);
  r.estimate = mean;
  r.std_error = n_paths > 1 ? std::sqrt(var / static_cast<double>(n_paths - 1) /
                                        static_cast<double>(n_paths))
                            : 0.0;
  r.pass = r.estimate <= r.bound;
  return r;
}

}  // namespace mfc
