#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mfc/control_opt.hpp"

namespace mfc {

struct ConvergenceRow {
  double key = 0.0;  ///< N or j
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_seeds = 0;
  double median = 0.0;
  std::vector<double> samples;
};

struct ConvergenceTable {
  std::string name;
  std::string sweep;  ///< column name of the sweep variable
  std::vector<ConvergenceRow> rows;
  bool heuristic = false;
  std::map<std::string, std::string> metadata;
};

/// Mean, standard error and median of a sample.
ConvergenceRow summarize(double key, std::vector<double> samples);

/// True when means decrease along the rows, allowing at most `inversions`
/// increases that each stay within one pooled standard error.
bool decreasing_with_tolerance(const ConvergenceTable& table, std::size_t inversions = 1);
/// True when medians strictly decrease along the rows.
bool medians_decreasing(const ConvergenceTable& table);

/// Header `<sweep>,mean,stderr,n_seeds,median`.
void write_table_csv(std::ostream& out, const ConvergenceTable& table);
/// Whitespace-separated columns for gnuplot, metadata as comments.
void write_gnuplot_dat(std::ostream& out, const ConvergenceTable& table);

struct ChaosOptions {
  /// Reference seed; by default derived from cfg.seed so it differs from
  /// every sweep seed.
  std::uint64_t reference_seed = 0;
  bool use_reference_seed = false;
  /// Use sliced W_1 for N above the exact cap instead of failing.
  bool allow_sliced = false;
  std::size_t exact_cap = kDefaultExactCap;
  std::size_t n_projections = 64;
};

/// sup_t W_1(mu^N_t, mu^ref_t) with mu^ref a seeded N-point subsample (fixed
/// across time) of an interacting run with N_ref particles.
ConvergenceTable chaos_experiment(const LeaderFollowerModel& model, const ControlSpec& u,
                                  const std::vector<std::size_t>& N_list, std::size_t N_ref,
                                  const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                  const ChaosOptions& opts = {});

/// Seeded choice of n distinct indices out of n_ref (identity when equal).
std::vector<std::size_t> subsample_indices(std::size_t n_ref, std::size_t n, std::uint64_t seed);

struct GammaOptions {
  std::size_t N_ref = 0;  ///< 0 selects 8 * max(N_list)
  std::uint64_t reference_seed = 0x5eed;
  /// F is averaged over this many independent reference solves.
  std::size_t replicates = 4;
  MeanFieldCostOptions meanfield;
};

/// |F^N[u] - F[u]| per seed, with F from the mean-field solver at N_ref.
ConvergenceTable gamma_convergence_experiment(const ControlSpec& u,
                                              const LeaderFollowerModel& model,
                                              const CostSpec& cost,
                                              const std::vector<std::size_t>& N_list,
                                              const SimConfig& cfg,
                                              const std::vector<std::uint64_t>& seeds,
                                              const GammaOptions& opts = {});

struct MinimaOptions {
  std::size_t budget = 40;
  double step0 = 0.5;
  GammaOptions gamma;
};

/// |min_u F^N - min_u F| per seed using optimize(); flagged heuristic because
/// the optimizer may stop at a local minimum.
ConvergenceTable minima_convergence_experiment(const ControlSpec& u0,
                                               const LeaderFollowerModel& model,
                                               const CostSpec& cost,
                                               const std::vector<std::size_t>& N_list,
                                               const SimConfig& cfg,
                                               const std::vector<std::uint64_t>& seeds,
                                               const MinimaOptions& opts = {});

}  // namespace mfc
