#include "mfc/phase_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "mfc/error.hpp"

namespace mfc {

namespace {

std::atomic<std::uint64_t> g_next_flow_id{1};

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double squared_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (double x : a) s += x * x;
  for (double x : b) s += x * x;
  return s;
}

double pow_norm(double norm, double p) {
  if (p == 2.0) return norm * norm;
  if (p == 1.0) return norm;
  return std::pow(norm, p);
}

}  // namespace

PhasePoint::PhasePoint(std::vector<double> position, std::vector<double> velocity)
    : x(std::move(position)), v(std::move(velocity)) {
  if (x.empty() || x.size() != v.size())
    throw Error("phase point: position and velocity need the same dimension d >= 1");
  if (!all_finite(x) || !all_finite(v)) throw Error("phase point: non-finite entry");
}

double PhasePoint::norm() const { return std::sqrt(squared_norm(x, v)); }

ParticleEnsemble::ParticleEnsemble(std::size_t dim, std::vector<double> positions,
                                   std::vector<double> velocities)
    : dim_(dim), x_(std::move(positions)), v_(std::move(velocities)) {
  if (dim_ == 0) throw Error("ensemble: dimension must be >= 1");
  if (x_.size() != v_.size() || x_.size() % dim_ != 0)
    throw Error("ensemble: position/velocity arrays must both be N x d");
  if (!all_finite(x_) || !all_finite(v_)) throw Error("ensemble: non-finite entry");
}

ParticleEnsemble ParticleEnsemble::from_points(std::span<const PhasePoint> points) {
  if (points.empty()) throw Error("ensemble: no points");
  const std::size_t d = points.front().dim();
  std::vector<double> xs, vs;
  xs.reserve(points.size() * d);
  vs.reserve(points.size() * d);
  for (const auto& p : points) {
    if (p.dim() != d) throw Error("ensemble: mixed dimensions");
    xs.insert(xs.end(), p.x.begin(), p.x.end());
    vs.insert(vs.end(), p.v.begin(), p.v.end());
  }
  return ParticleEnsemble(d, std::move(xs), std::move(vs));
}

PhasePoint ParticleEnsemble::point(std::size_t i) const {
  const auto xi = x(i);
  const auto vi = v(i);
  return PhasePoint({xi.begin(), xi.end()}, {vi.begin(), vi.end()});
}

double ParticleEnsemble::norm(std::size_t i) const {
  return std::sqrt(squared_norm(x(i), v(i)));
}

ParticleEnsemble ParticleEnsemble::scaled(double lambda) const {
  auto xs = x_;
  auto vs = v_;
  for (auto& e : xs) e *= lambda;
  for (auto& e : vs) e *= lambda;
  return ParticleEnsemble(dim_, std::move(xs), std::move(vs));
}

ParticleEnsemble ParticleEnsemble::translated(std::span<const double> dx,
                                              std::span<const double> dv) const {
  if (dx.size() != dim_ || dv.size() != dim_) throw Error("translate: dimension mismatch");
  auto xs = x_;
  auto vs = v_;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] += dx[i % dim_];
    vs[i] += dv[i % dim_];
  }
  return ParticleEnsemble(dim_, std::move(xs), std::move(vs));
}

ParticleEnsemble ParticleEnsemble::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size()) throw Error("permute: order length differs from N");
  return subset(order);
}

ParticleEnsemble ParticleEnsemble::subset(std::span<const std::size_t> indices) const {
  std::vector<double> xs, vs;
  xs.reserve(indices.size() * dim_);
  vs.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= size()) throw Error("subset: index out of range");
    const auto xi = x(i);
    const auto vi = v(i);
    xs.insert(xs.end(), xi.begin(), xi.end());
    vs.insert(vs.end(), vi.begin(), vi.end());
  }
  return ParticleEnsemble(dim_, std::move(xs), std::move(vs));
}

std::vector<double> ParticleEnsemble::mean_position() const {
  if (empty()) throw Error("empty measure");
  std::vector<double> m(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < dim_; ++j) m[j] += x_[i * dim_ + j];
  for (auto& e : m) e /= static_cast<double>(size());
  return m;
}

std::vector<double> ParticleEnsemble::mean_velocity() const {
  if (empty()) throw Error("empty measure");
  std::vector<double> m(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < dim_; ++j) m[j] += v_[i * dim_ + j];
  for (auto& e : m) e /= static_cast<double>(size());
  return m;
}

std::vector<double> uniform_grid(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || n_steps == 0)
    throw Error("grid: need horizon > 0 and n_steps >= 1");
  const double step = horizon / static_cast<double>(n_steps);
  std::vector<double> grid(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) grid[k] = static_cast<double>(k) * step;
  return grid;
}

MeasureFlow::MeasureFlow(std::vector<double> grid, std::vector<ParticleEnsemble> snapshots)
    : grid_(std::move(grid)), snaps_(std::move(snapshots)), id_(g_next_flow_id++) {
  if (grid_.empty() || grid_.size() != snaps_.size())
    throw Error("flow: grid and snapshot counts differ");
  for (std::size_t k = 1; k < grid_.size(); ++k)
    if (!(grid_[k] > grid_[k - 1])) throw Error("flow: grid must be strictly increasing");
  const std::size_t n = snaps_.front().size();
  const std::size_t d = snaps_.front().dim();
  if (n == 0) throw Error("flow: empty snapshot");
  for (const auto& s : snaps_)
    if (s.size() != n || s.dim() != d) throw Error("flow: snapshots differ in N or d");
  if (grid_.size() >= 2) {
    const double step = grid_[1] - grid_[0];
    bool uniform = grid_[0] == 0.0;
    for (std::size_t k = 0; uniform && k < grid_.size(); ++k)
      uniform = grid_[k] == static_cast<double>(k) * step;
    if (uniform) base_step_ = step;
  }
}

MeasureFlow MeasureFlow::constant(const ParticleEnsemble& ens, std::vector<double> grid) {
  std::vector<ParticleEnsemble> snaps(grid.size(), ens);
  return MeasureFlow(std::move(grid), std::move(snaps));
}

double MeasureFlow::time_gap(std::size_t j, std::size_t k) const {
  if (base_step_ > 0.0) {
    const std::size_t diff = j > k ? j - k : k - j;
    return static_cast<double>(diff) * base_step_;
  }
  return std::abs(grid_.at(j) - grid_.at(k));
}

std::size_t MeasureFlow::node_at(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(grid_.back()));
  if (t < grid_.front() - slack || t > grid_.back() + slack)
    throw Error("time " + std::to_string(t) + " outside the flow grid");
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t + slack);
  return static_cast<std::size_t>(std::distance(grid_.begin(), it)) - 1;
}

FlowView MeasureFlow::view(std::size_t k) const {
  if (k >= nodes()) throw Error("flow view: node out of range");
  return FlowView(grid_, snaps_, k, id_);
}

FlowView::FlowView(const std::vector<double>& grid,
                   const std::vector<ParticleEnsemble>& snapshots, std::size_t k,
                   std::uint64_t id)
    : grid_(&grid), snaps_(&snapshots), k_(k), id_(id) {
  if (k >= snapshots.size() || k >= grid.size()) throw Error("flow view: node out of range");
}

double FlowView::time_at(std::size_t j) const {
  if (j > k_) throw Error("flow view: time of a future node requested");
  return (*grid_)[j];
}

const ParticleEnsemble& FlowView::at(std::size_t j) const {
  if (j > k_) throw Error("flow view: snapshot of a future node requested");
  return (*snaps_)[j];
}

FlowView FlowView::prefix(std::size_t j) const {
  if (j > k_) throw Error("flow view: prefix beyond the current node requested");
  return FlowView(*grid_, *snaps_, j, id_);
}

double FlowView::sup_moment(double p) const {
  double best = 0.0;
  for (std::size_t j = 0; j <= k_; ++j) best = std::max(best, moment_p((*snaps_)[j], p));
  return best;
}

LeaderState::LeaderState(std::size_t leaders, std::size_t dim)
    : m(leaders), d(dim), y(leaders * dim, 0.0), w(leaders * dim, 0.0) {}

LeaderState::LeaderState(std::size_t dim, std::vector<double> positions,
                         std::vector<double> velocities)
    : d(dim), y(std::move(positions)), w(std::move(velocities)) {
  if (d == 0) throw Error("leaders: dimension must be >= 1");
  if (y.size() % d != 0) throw Error("leaders: positions must be m x d");
  if (w.empty()) w.assign(y.size(), 0.0);
  if (w.size() != y.size()) throw Error("leaders: velocities must match positions");
  if (!all_finite(y) || !all_finite(w)) throw Error("leaders: non-finite entry");
  m = y.size() / d;
}

double LeaderState::norm() const { return std::sqrt(squared_norm(y, w)); }

bool YoungFunction::check_on_grid(double upper, std::size_t samples) const {
  if (!phi || samples < 2) return false;
  if (phi(0.0) != 0.0) return false;
  double prev = 0.0;
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = upper * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double y = phi(x);
    if (!(y >= 0.0) || y < prev) return false;
    if (dominated_by_square && y > x * x * (1 + 1e-12)) return false;
    prev = y;
  }
  return true;
}

YoungFunction YoungFunction::identity() {
  return {"identity", [](double x) { return x; }, false};
}

YoungFunction YoungFunction::x_log1p() {
  return {"x_log1p", [](double x) { return x * std::log1p(x); }, true};
}

YoungFunction YoungFunction::truncated_cubic() {
  return {"truncated_cubic", [](double x) { return x * x * std::min(1.0, x); }, true};
}

double moment_p(const ParticleEnsemble& ens, double p) {
  if (!(p >= 1.0)) throw Error("moment: p must be >= 1");
  if (ens.empty()) throw Error("empty measure");
  double sum = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) sum += pow_norm(ens.norm(i), p);
  return sum / static_cast<double>(ens.size());
}

double sup_moment(const MeasureFlow& flow, double p, double t) {
  const std::size_t last = flow.node_at(t);
  double best = 0.0;
  for (std::size_t k = 0; k <= last; ++k) best = std::max(best, moment_p(flow.at(k), p));
  return best;
}

double young_moment(const ParticleEnsemble& ens, const YoungFunction& phi, double p) {
  if (!(p >= 1.0)) throw Error("young moment: p must be >= 1");
  if (ens.empty()) throw Error("empty measure");
  if (!phi.phi) throw Error("young moment: missing function");
  double sum = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) sum += phi.phi(pow_norm(ens.norm(i), p));
  return sum / static_cast<double>(ens.size());
}

double holder_exponent(double p) { return 1.0 / std::max(2.0, p); }

double holder_ratio(const MeasureFlow& flow, double p, const DistanceFn& wp) {
  if (flow.nodes() < 2) throw Error("holder ratio: flow needs at least two snapshots");
  const double gamma = holder_exponent(p);
  double best = 0.0;
  for (std::size_t j = 0; j < flow.nodes(); ++j)
    for (std::size_t k = j + 1; k < flow.nodes(); ++k) {
      const double dist = wp(flow.at(j), flow.at(k));
      best = std::max(best, dist / std::pow(flow.time_gap(j, k), gamma));
    }
  return best;
}

}  // namespace mfc
