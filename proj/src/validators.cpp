#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfc/drift.hpp"
#include "mfc/error.hpp"
#include "mfc/rng.hpp"

namespace mfc {

namespace {

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double e : a) s += e * e;
  return std::sqrt(s);
}

double diff_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double diff_norm(const PhasePoint& a, const PhasePoint& b) {
  const double dx = diff_norm(a.x, b.x), dv = diff_norm(a.v, b.v);
  return std::sqrt(dx * dx + dv * dv);
}

std::string describe(const PhasePoint& z) {
  std::ostringstream os;
  os << "x=(";
  for (std::size_t j = 0; j < z.x.size(); ++j) os << (j ? "," : "") << z.x[j];
  os << ") v=(";
  for (std::size_t j = 0; j < z.v.size(); ++j) os << (j ? "," : "") << z.v[j];
  os << ")";
  return os.str();
}

void check_dim(const DriftField& f, const PhasePoint& z) {
  if (z.dim() != f.dim()) throw Error("validator: sample dimension does not match the field");
}

}  // namespace

ValidationReport validate_sublinearity(const DriftField& f, const MeasureFlow& flow,
                                       std::span<const PhasePoint> sample_z,
                                       std::span<const double> sample_t) {
  const auto& c = f.constants();
  ValidationReport rep;
  rep.check = "sublinearity";
  rep.threshold = c.K * (1.0 + kValidationTol);
  const double mbar = std::pow(sup_moment(flow, c.p, flow.horizon()), 1.0 / c.p);
  std::vector<double> out(f.dim());
  for (double t : sample_t) {
    const auto view = flow.view(flow.node_at(t));
    for (const auto& z : sample_z) {
      check_dim(f, z);
      f.eval(view, z.x, z.v, out);
      const double denom =
          1.0 + std::pow(norm(z.x), c.beta / 3.0) + std::pow(norm(z.v), c.beta) + mbar;
      const double ratio = norm(out) / denom;
      ++rep.samples;
      if (!(ratio <= rep.worst_ratio)) {
        rep.worst_ratio = ratio;
        rep.offender = "t=" + std::to_string(t) + " " + describe(z);
      }
    }
  }
  rep.pass = rep.worst_ratio <= rep.threshold;
  return rep;
}

ValidationReport validate_hoelder(const DriftField& f, const MeasureFlow& flow,
                                  std::span<const std::pair<PhasePoint, PhasePoint>> pairs,
                                  double L, double alpha, double R) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("validate_hoelder: alpha must lie in (0, 1]");
  ValidationReport rep;
  rep.check = "hoelder";
  rep.threshold = L * (1.0 + kValidationTol);
  std::vector<double> f1(f.dim()), f2(f.dim());
  for (std::size_t k = 0; k < flow.nodes(); ++k) {
    const auto view = flow.view(k);
    for (const auto& [z1, z2] : pairs) {
      check_dim(f, z1);
      check_dim(f, z2);
      const double dx = diff_norm(z1.x, z2.x), dv = diff_norm(z1.v, z2.v);
      if ((dx == 0.0 && dv == 0.0) || z1.norm() > R || z2.norm() > R) {
        ++rep.skipped;
        continue;
      }
      f.eval(view, z1.x, z1.v, f1);
      f.eval(view, z2.x, z2.v, f2);
      const double ratio =
          diff_norm(f1, f2) / (std::pow(dx, alpha / 3.0) + std::pow(dv, alpha));
      ++rep.samples;
      if (!(ratio <= rep.worst_ratio)) {
        rep.worst_ratio = ratio;
        rep.offender = "node " + std::to_string(k) + ": " + describe(z1) + " vs " + describe(z2);
      }
    }
  }
  rep.pass = rep.worst_ratio <= rep.threshold;
  return rep;
}

// |dx| <= 2R inside the ball, and |dx| <= (2R)^{2/3} |dx|^{1/3} there.
double kernel_drift_hoelder_constant(double kernel_lipschitz, double radius) {
  return kernel_lipschitz * std::max(1.0, std::pow(2.0 * radius, 2.0 / 3.0));
}

ValidationReport validate_dissipativity_v3pp(
    const DriftField& f, const MeasureFlow& flow1, const MeasureFlow& flow2,
    std::span<const std::pair<PhasePoint, PhasePoint>> pairs,
    std::span<const std::size_t> nodes, GapMetric metric) {
  if (flow1.grid() != flow2.grid()) throw Error("dissipativity: flows must share a grid");
  if (!(flow1.at(0) == flow2.at(0)))
    throw Error("dissipativity: flows must share the initial snapshot");
  const auto& c = f.constants();
  ValidationReport rep;
  rep.check = "dissipativity";
  rep.threshold = c.D * (1.0 + kValidationTol);

  std::size_t last = 0;
  for (std::size_t k : nodes) {
    if (k >= flow1.nodes()) throw Error("dissipativity: node index out of range");
    last = std::max(last, k);
  }
  // Running sup of the node distances.
  std::vector<double> gap(last + 1, 0.0);
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = ensemble_distance(flow1.at(k), flow2.at(k), c.p, metric);
    gap[k] = std::max(k ? gap[k - 1] : 0.0, w);
  }

  std::vector<double> f1(f.dim()), f2(f.dim());
  for (std::size_t k : nodes) {
    const auto v1 = flow1.view(k), v2 = flow2.view(k);
    for (const auto& [z1, z2] : pairs) {
      check_dim(f, z1);
      check_dim(f, z2);
      const double denom = gap[k] + diff_norm(z1, z2);
      f.eval(v1, z1.x, z1.v, f1);
      f.eval(v2, z2.x, z2.v, f2);
      const double num = diff_norm(f1, f2);
      if (denom == 0.0) {
        if (num == 0.0) {
          ++rep.skipped;
          continue;
        }
        rep.worst_ratio = std::numeric_limits<double>::infinity();
        rep.offender = "node " + std::to_string(k) + ": nonzero difference at zero distance";
        ++rep.samples;
        continue;
      }
      const double ratio = num / denom;
      ++rep.samples;
      if (!(ratio <= rep.worst_ratio)) {
        rep.worst_ratio = ratio;
        rep.offender = "node " + std::to_string(k) + ": " + describe(z1) + " vs " + describe(z2);
      }
    }
  }
  rep.pass = rep.worst_ratio <= rep.threshold;
  return rep;
}

std::vector<PhasePoint> latin_hypercube(std::size_t n, std::size_t dim, double half_width,
                                        std::uint64_t seed) {
  if (dim == 0) throw Error("latin_hypercube: dimension must be >= 1");
  const std::size_t cols = 2 * dim;
  const CounterRng rng(seed, Stream::sampling);
  std::vector<std::vector<double>> coord(cols, std::vector<double>(n));
  std::vector<std::size_t> perm(n);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      const auto [u, unused] = rng.uniform2(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c), 1);
      (void)unused;
      const auto j = static_cast<std::size_t>(u * static_cast<double>(i));
      std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto [u, unused] = rng.uniform2(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c), 2);
      (void)unused;
      const double s = (static_cast<double>(perm[i]) + u) / static_cast<double>(n);
      coord[c][i] = half_width * (2.0 * s - 1.0);
    }
  }
  std::vector<PhasePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim), v(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = coord[j][i];
      v[j] = coord[dim + j][i];
    }
    pts.emplace_back(std::move(x), std::move(v));
  }
  return pts;
}

}  // namespace mfc
