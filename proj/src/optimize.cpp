#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfc/control_opt.hpp"
#include "mfc/error.hpp"
#include "mfc/rng.hpp"

namespace mfc {

OptimizeResult optimize(const ControlSpec& u0,
                        const std::function<double(const ControlSpec&)>& cost_fn,
                        std::size_t budget, double step0, std::uint64_t seed) {
  if (u0.cls != ControlClass::sv)
    throw Error("optimize: only sv controls have a finite parameterization");
  if (!(step0 > 0.0)) throw Error("optimize: step0 must be > 0");
  const double inf = std::numeric_limits<double>::infinity();
  const ControlSpec start = project_admissible(u0);
  const std::vector<double> x0 = start.parameters();
  const std::size_t n = x0.size();

  OptimizeResult res{start, inf, {}, {}, {}, 0};

  struct Vertex {
    std::vector<double> x;
    double f;
  };
  // Projects, evaluates and records one candidate.
  auto evaluate = [&](std::vector<double> x) -> Vertex {
    ControlSpec u = project_admissible(start.with_parameters(x));
    x = u.parameters();
    double f = inf;
    try {
      f = cost_fn(u);
      if (std::isnan(f)) f = inf;
    } catch (const std::exception&) {
      f = inf;
    }
    ++res.evaluations;
    res.costs.push_back(f);
    res.candidates.push_back(x);
    if (f < res.best_cost || res.evaluations == 1) {
      res.best_cost = f;
      res.best = u;
    }
    res.best_so_far.push_back(res.best_cost);
    return {std::move(x), f};
  };

  if (budget == 0) return res;
  std::vector<Vertex> simplex;
  simplex.push_back(evaluate(x0));
  if (n == 0) return res;

  const CounterRng rng(seed, Stream::optimizer);
  for (std::size_t i = 0; i < n && res.evaluations < budget; ++i) {
    std::vector<double> x = x0;
    const bool flip = (rng.bits(static_cast<std::uint32_t>(i), 0)[0] & 1u) != 0;
    x[i] += flip ? -step0 : step0;
    simplex.push_back(evaluate(std::move(x)));
  }
  if (simplex.size() < n + 1) return res;

  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto diameter = [&] {
    double best = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double e = simplex[i].x[j] - simplex[0].x[j];
        s += e * e;
      }
      best = std::max(best, std::sqrt(s));
    }
    return best;
  };
  auto affine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (w[j] - c[j]);
    return x;
  };

  while (res.evaluations < budget) {
    order();
    if (diameter() < 1e-8) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(n);
    Vertex& worst = simplex[n];

    Vertex r = evaluate(affine(centroid, worst.x, -1.0));
    if (r.f < simplex[0].f) {
      if (res.evaluations >= budget) {
        worst = std::move(r);
        break;
      }
      Vertex e = evaluate(affine(centroid, worst.x, -2.0));
      worst = e.f < r.f ? std::move(e) : std::move(r);
      continue;
    }
    if (r.f < simplex[n - 1].f) {
      worst = std::move(r);
      continue;
    }
    if (res.evaluations >= budget) break;
    const bool outside = r.f < worst.f;
    Vertex c = outside ? evaluate(affine(centroid, r.x, 0.5))
                       : evaluate(affine(centroid, worst.x, 0.5));
    if (c.f < (outside ? r.f : worst.f)) {
      worst = std::move(c);
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= n && res.evaluations < budget; ++i)
      simplex[i] = evaluate(affine(simplex[0].x, simplex[i].x, 0.5));
  }
  return res;
}

}  // namespace mfc
