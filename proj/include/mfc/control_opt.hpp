#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfc/control.hpp"
#include "mfc/initial_law.hpp"
#include "mfc/pdeode.hpp"
#include "mfc/sde.hpp"

namespace mfc {

/// The leader-follower particle model: followers interact through K11 and
/// feel leaders through K12; leaders feel followers through K21 and each
/// other through K22.
struct LeaderFollowerModel {
  std::size_t d = 1;
  KernelSet kernels;
  double sigma = 0.0;
  InitialLaw law = InitialLaw::point(1, {0.0, 0.0});
  LeaderState Y0;
  double p = 2.0;
  LeaderScheme scheme = LeaderScheme::euler;

  std::size_t m() const { return Y0.m; }
  /// Mean-field form: v = K11 * mu, w from K12, F from (K21, K22).
  CoupledModel coupled() const;
  /// cfg with this model's d and sigma.
  SimConfig config(double T, std::size_t n_steps, std::size_t N, std::uint64_t seed) const;
};

/// Running cost L(t, mu, H) and convex control cost Psi(u).
struct CostSpec {
  using Lagrangian =
      std::function<double(const FlowView& flow, std::span<const LeaderState> leaders)>;
  using Psi = std::function<double(std::span<const double> u)>;
  std::string name;
  Lagrangian lagrangian;
  Psi psi;
};

namespace costs {
CostSpec::Lagrangian zero_lagrangian();
CostSpec::Lagrangian constant_lagrangian(double c);
/// |mean_x(mu_t) - target|^2
CostSpec::Lagrangian mean_tracking(std::vector<double> target);
/// |mean leader position - target|^2
CostSpec::Lagrangian leader_tracking(std::vector<double> target);
CostSpec::Psi zero_psi();
/// weight |u|^2
CostSpec::Psi quadratic_psi(double weight);
CostSpec make(std::string name, CostSpec::Lagrangian L, CostSpec::Psi psi);
}  // namespace costs

/// Midpoint convexity Psi((a+b)/2) <= (Psi(a)+Psi(b))/2 + 1e-12 on random
/// segments in [-scale, scale]^dim.
bool psi_convexity_spot_check(const CostSpec::Psi& psi, std::size_t dim, std::size_t samples,
                              double scale, std::uint64_t seed);

/// Trapezoid rule for int_0^T L + Psi(u) along a computed solution.
double integrate_cost(const CostSpec& cost, const ControlSpec& u, const MeasureFlow& flow,
                      const LeaderTrajectory& leaders);

struct MeanFieldCostOptions {
  double tol = 1e-8;
  std::size_t max_iter = 50;
  PicardOptions picard;
};

/// Mean-field cost: the coupled system solved by Picard on N particles drawn
/// from the model's law with cfg.seed. Throws ConvergenceError.
double evaluate_cost_meanfield(const ControlSpec& u, const LeaderFollowerModel& model,
                               const CostSpec& cost, const SimConfig& cfg,
                               const MeanFieldCostOptions& opts = {});

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> samples;
};

/// Finite-N cost: one interacting particle run per seed (initial draw and
/// noise both keyed on the seed).
CostEstimate evaluate_cost_N(const ControlSpec& u, const LeaderFollowerModel& model,
                             const CostSpec& cost, const SimConfig& cfg,
                             std::span<const std::uint64_t> seeds);

struct OptimizeResult {
  ControlSpec best;
  double best_cost = 0.0;
  std::vector<double> costs;       ///< cost of every evaluation, in order
  std::vector<double> best_so_far; ///< running minimum of costs
  std::vector<std::vector<double>> candidates;  ///< projected parameters
  std::size_t evaluations = 0;
};

/// Nelder-Mead over the flattened h bins of an sv control. Every candidate is
/// projected onto the admissible set before evaluation; a throwing cost_fn
/// scores +inf. Stops after `budget` evaluations or when the simplex diameter
/// drops below 1e-8. The seed picks the signs of the initial simplex steps.
OptimizeResult optimize(const ControlSpec& u0,
                        const std::function<double(const ControlSpec&)>& cost_fn,
                        std::size_t budget, double step0, std::uint64_t seed);

}  // namespace mfc
