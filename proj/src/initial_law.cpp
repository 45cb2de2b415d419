#include "mfc/initial_law.hpp"

#include <cmath>
#include <numeric>

#include "mfc/error.hpp"
#include "mfc/rng.hpp"

namespace mfc {

InitialLaw InitialLaw::gaussian(std::size_t dim, std::vector<double> mean,
                                std::vector<double> variance) {
  InitialLaw law;
  law.kind = Kind::gaussian;
  law.dim = dim;
  law.mean = std::move(mean);
  law.variance = std::move(variance);
  law.validate();
  return law;
}

InitialLaw InitialLaw::standard_gaussian(std::size_t dim, double variance) {
  return gaussian(dim, std::vector<double>(2 * dim, 0.0), std::vector<double>(2 * dim, variance));
}

InitialLaw InitialLaw::uniform(std::size_t dim, std::vector<double> lower,
                               std::vector<double> upper) {
  InitialLaw law;
  law.kind = Kind::uniform;
  law.dim = dim;
  law.lower = std::move(lower);
  law.upper = std::move(upper);
  law.validate();
  return law;
}

InitialLaw InitialLaw::point(std::size_t dim, std::vector<double> location) {
  InitialLaw law;
  law.kind = Kind::point;
  law.dim = dim;
  law.location = std::move(location);
  law.validate();
  return law;
}

InitialLaw InitialLaw::mixture(std::vector<InitialLaw> components, std::vector<double> weights) {
  InitialLaw law;
  law.kind = Kind::mixture;
  law.dim = components.empty() ? 0 : components.front().dim;
  law.components = std::move(components);
  law.weights = std::move(weights);
  law.validate();
  return law;
}

void InitialLaw::validate() const {
  if (dim == 0) throw Error("initial law: dimension must be >= 1");
  const std::size_t n = 2 * dim;
  auto finite = [](const std::vector<double>& v) {
    for (double e : v)
      if (!std::isfinite(e)) return false;
    return true;
  };
  switch (kind) {
    case Kind::gaussian:
      if (mean.size() != n || variance.size() != n)
        throw Error("gaussian law: mean and variance need 2d entries");
      if (!finite(mean) || !finite(variance)) throw Error("gaussian law: non-finite parameter");
      for (double s : variance)
        if (s < 0.0) throw Error("gaussian law: variances must be >= 0");
      break;
    case Kind::uniform:
      if (lower.size() != n || upper.size() != n)
        throw Error("uniform law: box bounds need 2d entries");
      if (!finite(lower) || !finite(upper)) throw Error("uniform law: non-finite bound");
      for (std::size_t j = 0; j < n; ++j)
        if (lower[j] > upper[j]) throw Error("uniform law: lower bound exceeds upper bound");
      break;
    case Kind::point:
      if (location.size() != n) throw Error("point law: location needs 2d entries");
      if (!finite(location)) throw Error("point law: non-finite location");
      break;
    case Kind::mixture: {
      if (components.empty()) throw Error("mixture law: no components");
      if (weights.size() != components.size())
        throw Error("mixture law: one weight per component required");
      double total = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("mixture law: weights must be >= 0");
        total += w;
      }
      if (!(total > 0.0)) throw Error("mixture law: weights sum to zero");
      for (const auto& c : components) {
        if (c.dim != dim) throw Error("mixture law: components differ in dimension");
        c.validate();
      }
      break;
    }
  }
}

namespace {

// `tag` separates nested mixture levels so a component never reuses the
// uniform that selected it.
void draw(const InitialLaw& law, const CounterRng& rng, std::uint32_t index, std::uint32_t tag,
          std::span<double> out) {
  const std::size_t n = 2 * law.dim;
  switch (law.kind) {
    case InitialLaw::Kind::point:
      std::copy(law.location.begin(), law.location.end(), out.begin());
      return;
    case InitialLaw::Kind::gaussian:
      for (std::size_t j = 0; j < n; j += 2) {
        const auto [g0, g1] = rng.normal2(index, static_cast<std::uint32_t>(j / 2), tag);
        out[j] = law.mean[j] + std::sqrt(law.variance[j]) * g0;
        if (j + 1 < n) out[j + 1] = law.mean[j + 1] + std::sqrt(law.variance[j + 1]) * g1;
      }
      return;
    case InitialLaw::Kind::uniform:
      for (std::size_t j = 0; j < n; j += 2) {
        const auto [u0, u1] = rng.uniform2(index, static_cast<std::uint32_t>(j / 2), tag);
        out[j] = law.lower[j] + (law.upper[j] - law.lower[j]) * u0;
        if (j + 1 < n) out[j + 1] = law.lower[j + 1] + (law.upper[j + 1] - law.lower[j + 1]) * u1;
      }
      return;
    case InitialLaw::Kind::mixture: {
      const double total = std::accumulate(law.weights.begin(), law.weights.end(), 0.0);
      const double u = rng.uniform2(index, 0xffffffffu, tag).first * total;
      std::size_t pick = law.components.size() - 1;
      double acc = 0.0;
      for (std::size_t c = 0; c < law.components.size(); ++c) {
        acc += law.weights[c];
        if (u < acc) {
          pick = c;
          break;
        }
      }
      draw(law.components[pick], rng, index, tag + 1, out);
      return;
    }
  }
}

}  // namespace

ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t n, std::uint64_t seed) {
  law.validate();
  const std::size_t d = law.dim;
  const CounterRng rng(seed, Stream::initial_law);
  std::vector<double> xs(n * d), vs(n * d), z(2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    draw(law, rng, static_cast<std::uint32_t>(i), 0, z);
    std::copy(z.begin(), z.begin() + d, xs.begin() + i * d);
    std::copy(z.begin() + d, z.end(), vs.begin() + i * d);
  }
  return ParticleEnsemble(d, std::move(xs), std::move(vs));
}

}  // namespace mfc
