#include "mfc/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mfc/error.hpp"
#include "mfc/parallel.hpp"
#include "mfc/rng.hpp"

namespace mfc {

namespace {

void check_pair(const ParticleEnsemble& a, const ParticleEnsemble& b, double p) {
  if (a.size() != b.size())
    throw Error("wasserstein requires equal-size ensembles (resample one side first)");
  if (a.empty()) throw Error("empty measure");
  if (a.dim() != b.dim()) throw Error("wasserstein: dimension mismatch");
  if (!(p >= 1.0)) throw Error("wasserstein: p must be >= 1");
}

double point_distance(const ParticleEnsemble& a, std::size_t i, const ParticleEnsemble& b,
                      std::size_t j) {
  double s = 0.0;
  const auto xa = a.x(i), xb = b.x(j), va = a.v(i), vb = b.v(j);
  for (std::size_t k = 0; k < xa.size(); ++k) {
    const double dx = xa[k] - xb[k];
    const double dv = va[k] - vb[k];
    s += dx * dx + dv * dv;
  }
  return std::sqrt(s);
}

double pow_cost(double dist, double p) {
  if (p == 1.0) return dist;
  if (p == 2.0) return dist * dist;
  return std::pow(dist, p);
}

struct Potentials {
  std::vector<double> row;
  std::vector<double> col;
  std::vector<std::size_t> match_row;  // row -> col
};

// Shortest augmenting path Hungarian method, O(n^3), with dual potentials.
Potentials hungarian(const std::vector<double>& c, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const double* crow = c.data() + (i0 - 1) * n;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = crow[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials pot;
  pot.row.assign(u.begin() + 1, u.end());
  pot.col.assign(v.begin() + 1, v.end());
  pot.match_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) pot.match_row[owner[j] - 1] = j - 1;
  return pot;
}

// Rewrites an optimal matching into the lexicographically smallest perfect
// matching of the tight subgraph (edges with zero reduced cost). By
// complementary slackness these are exactly the optimal assignments.
void lexicographic_refine(const std::vector<double>& c, std::size_t n, Potentials& pot) {
  double scale = 0.0;
  for (double e : c) scale = std::max(scale, std::abs(e));
  const double tol = 1e-12 * std::max(scale, std::numeric_limits<double>::min()) *
                     std::max(1.0, std::sqrt(static_cast<double>(n)));

  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c[i * n + j] - pot.row[i] - pot.col[j] <= tol) tight[i].push_back(j);

  auto& match_row = pot.match_row;
  std::vector<std::size_t> match_col(n);
  for (std::size_t i = 0; i < n; ++i) match_col[match_row[i]] = i;

  std::vector<std::size_t> queue;
  std::vector<char> col_seen(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : tight[i]) {
      if (match_row[i] == j) break;
      if (match_col[j] < i) continue;  // held by a fixed row
      // Row r loses column j; look for an alternating path from r back to
      // the column i gives up, avoiding fixed rows, row i and column j.
      const std::size_t freed = match_row[i];
      const std::size_t r = match_col[j];
      std::fill(col_seen.begin(), col_seen.end(), 0);
      col_seen[j] = 1;
      queue.assign(1, r);
      const std::size_t none = n;
      std::size_t found = none;
      std::vector<std::size_t> row_from_col(n, none);
      for (std::size_t head = 0; head < queue.size() && found == none; ++head) {
        const std::size_t row = queue[head];
        for (std::size_t col : tight[row]) {
          if (col_seen[col]) continue;
          col_seen[col] = 1;
          row_from_col[col] = row;
          if (col == freed) {
            found = col;
            break;
          }
          const std::size_t next = match_col[col];
          if (next <= i) continue;
          queue.push_back(next);
        }
      }
      if (found == none) continue;
      // Flip the path: walk back from the freed column.
      std::size_t col = found;
      while (true) {
        const std::size_t row = row_from_col[col];
        const std::size_t prev_col = match_row[row];
        match_row[row] = col;
        match_col[col] = row;
        if (row == r) break;
        col = prev_col;
      }
      match_row[i] = j;
      match_col[j] = i;
      break;
    }
  }
}

}  // namespace

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  if (cost.size() != n * n) throw Error("assignment: cost matrix must be n x n");
  if (n == 0) return {};
  auto pot = hungarian(cost, n);
  lexicographic_refine(cost, n, pot);
  return pot.match_row;
}

TransportPlan wasserstein_exact(const ParticleEnsemble& a, const ParticleEnsemble& b,
                                double p, std::size_t cap) {
  check_pair(a, b, p);
  const std::size_t n = a.size();
  if (n > cap)
    throw Error("wasserstein_exact: N = " + std::to_string(n) + " exceeds the cap of " +
                std::to_string(cap) + "; use sliced_w1 or the paired bound");
  std::vector<double> cost(n * n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = pow_cost(point_distance(a, i, b, j), p);
  });
  TransportPlan plan;
  plan.assignment = solve_assignment(cost, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + plan.assignment[i]];
  plan.cost = std::pow(total / static_cast<double>(n), 1.0 / p);
  return plan;
}

double wasserstein_paired_bound(const ParticleEnsemble& a, const ParticleEnsemble& b,
                                double p) {
  check_pair(a, b, p);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += pow_cost(point_distance(a, i, b, i), p);
  return std::pow(total / static_cast<double>(a.size()), 1.0 / p);
}

std::vector<double> sliced_w1_samples(const ParticleEnsemble& a, const ParticleEnsemble& b,
                                      std::size_t n_proj, std::uint64_t seed) {
  check_pair(a, b, 1.0);
  if (n_proj == 0) throw Error("sliced_w1: need at least one projection");
  const std::size_t d = a.dim();
  const std::size_t n = a.size();
  const CounterRng rng(seed, Stream::projection);
  std::vector<double> out(n_proj);
  std::vector<double> theta(2 * d), pa(n), pb(n);
  for (std::size_t k = 0; k < n_proj; ++k) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < 2 * d; j += 2) {
      const auto [g0, g1] = rng.normal2(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j / 2));
      theta[j] = g0;
      if (j + 1 < 2 * d) theta[j + 1] = g1;
    }
    for (double t : theta) norm2 += t * t;
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& t : theta) t *= inv;
    auto project = [&](const ParticleEnsemble& e, std::vector<double>& dst) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const auto xi = e.x(i), vi = e.v(i);
        for (std::size_t j = 0; j < d; ++j) s += theta[j] * xi[j] + theta[d + j] * vi[j];
        dst[i] = s;
      }
      std::sort(dst.begin(), dst.end());
    };
    project(a, pa);
    project(b, pb);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::abs(pa[i] - pb[i]);
    out[k] = total / static_cast<double>(n);
  }
  return out;
}

double sliced_w1(const ParticleEnsemble& a, const ParticleEnsemble& b, std::size_t n_proj,
                 std::uint64_t seed) {
  const auto samples = sliced_w1_samples(a, b, n_proj, seed);
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

double ensemble_distance(const ParticleEnsemble& a, const ParticleEnsemble& b, double p,
                         GapMetric metric, std::size_t exact_max_n) {
  switch (metric) {
    case GapMetric::paired:
      return wasserstein_paired_bound(a, b, p);
    case GapMetric::exact:
      return wasserstein_exact(a, b, p).cost;
    case GapMetric::automatic:
      return a.size() <= exact_max_n ? wasserstein_exact(a, b, p).cost
                                     : wasserstein_paired_bound(a, b, p);
  }
  return 0.0;
}

double sup_flow_distance(const MeasureFlow& a, const MeasureFlow& b, double p,
                         GapMetric metric, std::size_t exact_max_n) {
  if (a.nodes() != b.nodes()) throw Error("flow distance: grids differ");
  std::vector<double> per_node(a.nodes());
  parallel_for(a.nodes(), [&](std::size_t k) {
    per_node[k] = ensemble_distance(a.at(k), b.at(k), p, metric, exact_max_n);
  });
  return *std::max_element(per_node.begin(), per_node.end());
}

}  // namespace mfc
