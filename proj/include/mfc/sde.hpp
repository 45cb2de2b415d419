#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfc/control.hpp"
#include "mfc/drift.hpp"
#include "mfc/phase_space.hpp"

namespace mfc {

struct SimConfig {
  double T = 1.0;
  std::size_t n_steps = 100;
  std::size_t N = 1;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t d = 1;

  void validate() const;
  double dt() const { return T / static_cast<double>(n_steps); }
  std::vector<double> grid() const { return uniform_grid(T, n_steps); }
};

/// Brownian increments dB, already scaled by sqrt(dt). Path i at step k uses
/// the Philox counter (i, k, j/2) under the Brownian stream of `seed`, so a
/// path never depends on how many other paths were generated.
class BrownianPaths {
 public:
  BrownianPaths(std::size_t n_steps, std::size_t n_paths, std::size_t dim, double dt,
                std::uint64_t seed);

  std::span<const double> increment(std::size_t k, std::size_t i) const {
    return {data_.data() + (k * n_paths_ + i) * dim_, dim_};
  }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t dim() const { return dim_; }
  double dt() const { return dt_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t n_steps_, n_paths_, dim_;
  double dt_;
  std::uint64_t seed_;
  std::vector<double> data_;
};

BrownianPaths generate_brownian(const SimConfig& cfg);

/// Writes dB for one path at one step into out (length dim).
void brownian_increment(std::uint64_t seed, std::size_t path, std::size_t step, double dt,
                        std::span<double> out);

/// Drift of the frozen system at grid node k (time t).
using FrozenDrift = std::function<void(std::size_t k, double t, std::span<const double> x,
                                       std::span<const double> v, std::span<double> out)>;

/// Kinetic Euler-Maruyama:
///   v_{k+1} = v_k + F(t_k, x_k, v_k) dt + sqrt(2 sigma) dB_k
///   x_{k+1} = x_k + v_{k+1} dt
MeasureFlow simulate_frozen(const FrozenDrift& F, const ParticleEnsemble& init,
                            const SimConfig& cfg, const BrownianPaths& paths);

struct KernelSet {
  InteractionKernel k11 = kernels::zero();  ///< follower-follower
  InteractionKernel k12 = kernels::zero();  ///< leader -> follower
  InteractionKernel k21 = kernels::zero();  ///< follower -> leader (position only)
  InteractionKernel k22 = kernels::zero();  ///< leader-leader (position only)
};

struct InteractingRun {
  MeasureFlow flow;
  LeaderTrajectory leaders;
};

/// N followers and m leaders. Leaders: Y_{k+1} = Y_k + dt W_k with
/// W_k = (K21 * mu_k)(Y_k) + (1/m) sum K22 + u(t_k, mu^N); followers use the
/// kinetic scheme with the pairwise K11 sum and the K12 leader term.
InteractingRun simulate_interacting(const KernelSet& kernels, const ControlSpec& u,
                                    const ParticleEnsemble& init, const LeaderState& leaders,
                                    const SimConfig& cfg, const BrownianPaths& paths);

/// (1/sqrt(pi)) (2 p sqrt(T) / (p - 1))^p Gamma((p + 1) / 2).
double doob_bound(double p, double T);

struct DoobResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Monte Carlo mean of max_k |B(t_k)|^p for a scalar Brownian motion.
DoobResult doob_check(double p, double T, std::size_t n_paths, std::size_t n_steps,
                      std::uint64_t seed);

}  // namespace mfc
