#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfc/phase_space.hpp"

namespace mfc {

/// Optimal permutation coupling between two equal-size uniform measures.
struct TransportPlan {
  /// assignment[i] is the target index matched to source particle i.
  std::vector<std::size_t> assignment;
  /// ((1/N) sum |z_i - z'_{sigma(i)}|^p)^{1/p}
  double cost = 0.0;
};

/// Largest N accepted by wasserstein_exact unless a caller raises it.
inline constexpr std::size_t kDefaultExactCap = 4096;

/// Exact W_p between equal-size uniform empirical measures via a dense
/// Hungarian solve of the N x N assignment problem with costs |z_i - z'_j|^p.
/// Among optimal assignments (reduced costs within 1e-12 of the cost scale)
/// the lexicographically smallest permutation is reported.
TransportPlan wasserstein_exact(const ParticleEnsemble& a, const ParticleEnsemble& b,
                                double p, std::size_t cap = kDefaultExactCap);

/// W_p upper bound from the index coupling i -> i.
double wasserstein_paired_bound(const ParticleEnsemble& a, const ParticleEnsemble& b,
                                double p);

/// Sliced W_1: mean over n_proj random unit directions of the 1-d W_1 between
/// projected samples. Deterministic in seed.
double sliced_w1(const ParticleEnsemble& a, const ParticleEnsemble& b,
                 std::size_t n_proj, std::uint64_t seed);

/// Per-direction sliced values, for Monte Carlo error estimates.
std::vector<double> sliced_w1_samples(const ParticleEnsemble& a,
                                      const ParticleEnsemble& b, std::size_t n_proj,
                                      std::uint64_t seed);

/// Minimum-cost assignment on a dense row-major n x n matrix, returning the
/// lexicographically smallest optimal permutation.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

/// Distance used to compare two flows node by node.
enum class GapMetric {
  paired,  ///< index coupling, always an upper bound on W_p
  exact,   ///< assignment solve per node
  automatic,  ///< exact when N <= exact_max_n, else paired
};

double ensemble_distance(const ParticleEnsemble& a, const ParticleEnsemble& b, double p,
                         GapMetric metric, std::size_t exact_max_n = 256);

/// max over nodes of the chosen distance between two flows on the same grid.
double sup_flow_distance(const MeasureFlow& a, const MeasureFlow& b, double p,
                         GapMetric metric, std::size_t exact_max_n = 256);

}  // namespace mfc
