#include <cmath>

#include "mfc/control_opt.hpp"
#include "mfc/error.hpp"
#include "mfc/rng.hpp"

namespace mfc {

CoupledModel LeaderFollowerModel::coupled() const {
  return CoupledModel{fields::kernel_drift(kernels.k11, d, p),
                      leader_coupling_from_kernel(kernels.k12),
                      leader_field_from_kernels(kernels.k21, kernels.k22), Y0, scheme};
}

SimConfig LeaderFollowerModel::config(double T, std::size_t n_steps, std::size_t N,
                                      std::uint64_t seed) const {
  SimConfig cfg;
  cfg.T = T;
  cfg.n_steps = n_steps;
  cfg.N = N;
  cfg.sigma = sigma;
  cfg.seed = seed;
  cfg.d = d;
  return cfg;
}

namespace costs {

CostSpec::Lagrangian zero_lagrangian() {
  return [](const FlowView&, std::span<const LeaderState>) { return 0.0; };
}

CostSpec::Lagrangian constant_lagrangian(double c) {
  return [c](const FlowView&, std::span<const LeaderState>) { return c; };
}

CostSpec::Lagrangian mean_tracking(std::vector<double> target) {
  return [target](const FlowView& flow, std::span<const LeaderState>) {
    const auto mean = flow.current().mean_position();
    if (mean.size() != target.size()) throw Error("mean tracking: target dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < mean.size(); ++j) s += (mean[j] - target[j]) * (mean[j] - target[j]);
    return s;
  };
}

CostSpec::Lagrangian leader_tracking(std::vector<double> target) {
  return [target](const FlowView&, std::span<const LeaderState> leaders) {
    const LeaderState& now = leaders.back();
    if (now.m == 0) return 0.0;
    if (now.d != target.size()) throw Error("leader tracking: target dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < now.d; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < now.m; ++i) mean += now.pos(i)[j];
      mean /= static_cast<double>(now.m);
      s += (mean - target[j]) * (mean - target[j]);
    }
    return s;
  };
}

CostSpec::Psi zero_psi() {
  return [](std::span<const double>) { return 0.0; };
}

CostSpec::Psi quadratic_psi(double weight) {
  if (!(weight >= 0.0)) throw Error("quadratic psi: weight must be >= 0");
  return [weight](std::span<const double> u) {
    double s = 0.0;
    for (double e : u) s += e * e;
    return weight * s;
  };
}

CostSpec make(std::string name, CostSpec::Lagrangian L, CostSpec::Psi psi) {
  return CostSpec{std::move(name), std::move(L), std::move(psi)};
}

}  // namespace costs

bool psi_convexity_spot_check(const CostSpec::Psi& psi, std::size_t dim, std::size_t samples,
                              double scale, std::uint64_t seed) {
  const CounterRng rng(seed, Stream::sampling);
  std::vector<double> a(dim), b(dim), mid(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < dim; ++j) {
      const auto [u0, u1] = rng.uniform2(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(j));
      a[j] = scale * (2.0 * u0 - 1.0);
      b[j] = scale * (2.0 * u1 - 1.0);
      mid[j] = 0.5 * (a[j] + b[j]);
    }
    const double lhs = psi(mid), rhs = 0.5 * (psi(a) + psi(b));
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) return false;
  }
  return true;
}

double integrate_cost(const CostSpec& cost, const ControlSpec& u, const MeasureFlow& flow,
                      const LeaderTrajectory& leaders) {
  if (!cost.lagrangian || !cost.psi) throw Error("cost: missing lagrangian or psi");
  if (leaders.states.size() != flow.nodes()) throw Error("cost: leader grid differs from flow");
  std::vector<double> integrand(flow.nodes());
  for (std::size_t k = 0; k < flow.nodes(); ++k) {
    const auto view = flow.view(k);
    const double L = cost.lagrangian(view, std::span<const LeaderState>(leaders.states.data(), k + 1));
    const double P = cost.psi(evaluate_control(u, view));
    integrand[k] = L + P;
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < flow.nodes(); ++k)
    total += 0.5 * flow.time_gap(k, k + 1) * (integrand[k] + integrand[k + 1]);
  return total;
}

double evaluate_cost_meanfield(const ControlSpec& u, const LeaderFollowerModel& model,
                               const CostSpec& cost, const SimConfig& cfg,
                               const MeanFieldCostOptions& opts) {
  const ParticleEnsemble init = sample_initial(model.law, cfg.N, cfg.seed);
  const CoupledSolution sol =
      solve_coupled(model.coupled(), u, init, cfg, opts.tol, opts.max_iter, opts.picard);
  if (!sol.picard.converged)
    throw ConvergenceError("mean-field cost: coupled solve did not converge");
  return integrate_cost(cost, u, sol.flow, sol.leaders);
}

CostEstimate evaluate_cost_N(const ControlSpec& u, const LeaderFollowerModel& model,
                             const CostSpec& cost, const SimConfig& cfg,
                             std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw Error("finite-N cost: no seeds");
  CostEstimate est;
  for (std::uint64_t seed : seeds) {
    SimConfig c = cfg;
    c.seed = seed;
    const ParticleEnsemble init = sample_initial(model.law, c.N, seed);
    const BrownianPaths paths = generate_brownian(c);
    const InteractingRun run = simulate_interacting(model.kernels, u, init, model.Y0, c, paths);
    est.samples.push_back(integrate_cost(cost, u, run.flow, run.leaders));
  }
  const double n = static_cast<double>(est.samples.size());
  for (double s : est.samples) est.mean += s;
  est.mean /= n;
  if (est.samples.size() > 1) {
    double var = 0.0;
    for (double s : est.samples) var += (s - est.mean) * (s - est.mean);
    est.std_error = std::sqrt(var / (n - 1.0) / n);
  }
  return est;
}

}  // namespace mfc
