#include "mfc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "mfc/csv_io.hpp"
#include "mfc/error.hpp"
#include "mfc/rng.hpp"

namespace mfc {

ConvergenceRow summarize(double key, std::vector<double> samples) {
  ConvergenceRow row;
  row.key = key;
  row.n_seeds = samples.size();
  if (samples.empty()) return row;
  const double n = static_cast<double>(samples.size());
  row.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double var = 0.0;
    for (double s : samples) var += (s - row.mean) * (s - row.mean);
    row.std_error = std::sqrt(var / (n - 1.0) / n);
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  row.median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  row.samples = std::move(samples);
  return row;
}

bool decreasing_with_tolerance(const ConvergenceTable& table, std::size_t inversions) {
  std::size_t used = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    if (b.mean < a.mean) continue;
    const double pooled = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    if (b.mean - a.mean > pooled || ++used > inversions) return false;
  }
  return true;
}

bool medians_decreasing(const ConvergenceTable& table) {
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i].median < table.rows[i - 1].median)) return false;
  return true;
}

void write_table_csv(std::ostream& out, const ConvergenceTable& table) {
  out << table.sweep << ",mean,stderr,n_seeds,median\n";
  for (const auto& r : table.rows)
    out << format_double(r.key) << ',' << format_double(r.mean) << ','
        << format_double(r.std_error) << ',' << r.n_seeds << ',' << format_double(r.median)
        << '\n';
}

void write_gnuplot_dat(std::ostream& out, const ConvergenceTable& table) {
  out << "# " << table.name << '\n';
  if (table.heuristic) out << "# heuristic: optimizer minima may be local\n";
  for (const auto& [k, v] : table.metadata) out << "# " << k << " = " << v << '\n';
  out << "# " << table.sweep << " mean stderr median\n";
  for (const auto& r : table.rows)
    out << format_double(r.key) << ' ' << format_double(r.mean) << ' '
        << format_double(r.std_error) << ' ' << format_double(r.median) << '\n';
}

std::vector<std::size_t> subsample_indices(std::size_t n_ref, std::size_t n, std::uint64_t seed) {
  if (n > n_ref) throw Error("subsample: cannot draw more points than the reference holds");
  std::vector<std::size_t> idx(n_ref);
  std::iota(idx.begin(), idx.end(), 0);
  if (n == n_ref) return idx;
  const CounterRng rng(seed, Stream::subsample);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform2(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(n)).first;
    const std::size_t j = i + std::min(static_cast<std::size_t>(u * static_cast<double>(n_ref - i)),
                                       n_ref - i - 1);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

InteractingRun run_model(const LeaderFollowerModel& model, const ControlSpec& u,
                         SimConfig cfg, std::size_t N, std::uint64_t seed) {
  cfg.N = N;
  cfg.seed = seed;
  cfg.d = model.d;
  cfg.sigma = model.sigma;
  const ParticleEnsemble init = sample_initial(model.law, N, seed);
  const BrownianPaths paths = generate_brownian(cfg);
  return simulate_interacting(model.kernels, u, init, model.Y0, cfg, paths);
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

ConvergenceTable chaos_experiment(const LeaderFollowerModel& model, const ControlSpec& u,
                                  const std::vector<std::size_t>& N_list, std::size_t N_ref,
                                  const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                  const ChaosOptions& opts) {
  if (N_list.empty() || seeds.empty()) throw Error("chaos: empty N list or seed list");
  std::vector<std::size_t> sorted = N_list;
  std::sort(sorted.begin(), sorted.end());
  if (N_ref < sorted.back()) throw Error("chaos: N_ref must be at least max(N_list)");
  if (!opts.allow_sliced && sorted.back() > opts.exact_cap)
    throw Error("chaos: N above the exact cap; enable sliced mode");
  const std::uint64_t ref_seed =
      opts.use_reference_seed ? opts.reference_seed : derived_seed(cfg.seed, 0xc4a05);
  const InteractingRun ref = run_model(model, u, cfg, N_ref, ref_seed);

  ConvergenceTable table;
  table.name = "chaos";
  table.sweep = "N";
  table.metadata["N_ref"] = std::to_string(N_ref);
  table.metadata["reference_seed"] = std::to_string(ref_seed);
  table.metadata["N_list"] = join(sorted);
  table.metadata["metric"] = "sup_t W1";
  for (std::size_t N : sorted) {
    std::vector<double> samples;
    for (std::uint64_t seed : seeds) {
      const InteractingRun run = run_model(model, u, cfg, N, seed);
      const auto idx = subsample_indices(N_ref, N, seed);
      double worst = 0.0;
      for (std::size_t k = 0; k < run.flow.nodes(); ++k) {
        const ParticleEnsemble sub = ref.flow.at(k).subset(idx);
        const double w = N <= opts.exact_cap
                             ? wasserstein_exact(run.flow.at(k), sub, 1.0, opts.exact_cap).cost
                             : sliced_w1(run.flow.at(k), sub, opts.n_projections, seed);
        worst = std::max(worst, w);
      }
      samples.push_back(worst);
    }
    table.rows.push_back(summarize(static_cast<double>(N), std::move(samples)));
  }
  return table;
}

ConvergenceTable gamma_convergence_experiment(const ControlSpec& u,
                                              const LeaderFollowerModel& model,
                                              const CostSpec& cost,
                                              const std::vector<std::size_t>& N_list,
                                              const SimConfig& cfg,
                                              const std::vector<std::uint64_t>& seeds,
                                              const GammaOptions& opts) {
  if (N_list.empty() || seeds.empty()) throw Error("gamma: empty N list or seed list");
  std::vector<std::size_t> sorted = N_list;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t N_ref = opts.N_ref ? opts.N_ref : 8 * sorted.back();
  const std::size_t reps = std::max<std::size_t>(opts.replicates, 1);
  double F_ref = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t s = r ? derived_seed(opts.reference_seed, r) : opts.reference_seed;
    F_ref += evaluate_cost_meanfield(u, model, cost, model.config(cfg.T, cfg.n_steps, N_ref, s),
                                     opts.meanfield);
  }
  F_ref /= static_cast<double>(reps);
  ConvergenceTable table;
  table.name = "gamma";
  table.sweep = "N";
  table.metadata["F_ref"] = format_double(F_ref);
  table.metadata["N_ref"] = std::to_string(N_ref);
  table.metadata["replicates"] = std::to_string(reps);
  table.metadata["N_list"] = join(sorted);
  for (std::size_t N : sorted) {
    SimConfig c = model.config(cfg.T, cfg.n_steps, N, cfg.seed);
    std::vector<double> samples;
    for (std::uint64_t seed : seeds) {
      const std::uint64_t one[] = {seed};
      samples.push_back(std::abs(evaluate_cost_N(u, model, cost, c, one).mean - F_ref));
    }
    table.rows.push_back(summarize(static_cast<double>(N), std::move(samples)));
  }
  return table;
}

ConvergenceTable minima_convergence_experiment(const ControlSpec& u0,
                                               const LeaderFollowerModel& model,
                                               const CostSpec& cost,
                                               const std::vector<std::size_t>& N_list,
                                               const SimConfig& cfg,
                                               const std::vector<std::uint64_t>& seeds,
                                               const MinimaOptions& opts) {
  if (N_list.empty() || seeds.empty()) throw Error("minima: empty N list or seed list");
  std::vector<std::size_t> sorted = N_list;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t N_ref = opts.gamma.N_ref ? opts.gamma.N_ref : 8 * sorted.back();
  const SimConfig ref_cfg = model.config(cfg.T, cfg.n_steps, N_ref, opts.gamma.reference_seed);
  const auto mf = optimize(
      u0,
      [&](const ControlSpec& u) {
        return evaluate_cost_meanfield(u, model, cost, ref_cfg, opts.gamma.meanfield);
      },
      opts.budget, opts.step0, cfg.seed);
  ConvergenceTable table;
  table.name = "minima";
  table.sweep = "N";
  table.heuristic = true;
  table.metadata["min_meanfield"] = format_double(mf.best_cost);
  table.metadata["budget"] = std::to_string(opts.budget);
  table.metadata["N_list"] = join(sorted);
  for (std::size_t N : sorted) {
    const SimConfig c = model.config(cfg.T, cfg.n_steps, N, cfg.seed);
    std::vector<double> samples;
    for (std::uint64_t seed : seeds) {
      const std::uint64_t one[] = {seed};
      const auto res = optimize(
          u0, [&](const ControlSpec& u) { return evaluate_cost_N(u, model, cost, c, one).mean; },
          opts.budget, opts.step0, seed);
      samples.push_back(std::abs(res.best_cost - mf.best_cost));
    }
    table.rows.push_back(summarize(static_cast<double>(N), std::move(samples)));
  }
  return table;
}

}  // namespace mfc
