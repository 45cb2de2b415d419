#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mfc {

/// One agent state z = (x, v) in R^d x R^d.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> v;

  PhasePoint() = default;
  PhasePoint(std::vector<double> position, std::vector<double> velocity);

  std::size_t dim() const { return x.size(); }
  /// Euclidean norm of the concatenated 2d-vector.
  double norm() const;
};

/// Uniform-weight empirical measure (1/N) sum_i delta_{z_i}.
///
/// Positions and velocities are stored as two flat row-major N x d arrays.
/// An ensemble may be empty (N = 0); operations that need a probability
/// measure reject it.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(std::size_t dim, std::vector<double> positions,
                   std::vector<double> velocities);

  static ParticleEnsemble from_points(std::span<const PhasePoint> points);

  std::size_t size() const { return dim_ == 0 ? 0 : x_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> x(std::size_t i) const {
    return {x_.data() + i * dim_, dim_};
  }
  std::span<const double> v(std::size_t i) const {
    return {v_.data() + i * dim_, dim_};
  }
  PhasePoint point(std::size_t i) const;
  /// |z_i|, Euclidean norm of the concatenated (x_i, v_i).
  double norm(std::size_t i) const;

  const std::vector<double>& positions() const { return x_; }
  const std::vector<double>& velocities() const { return v_; }

  ParticleEnsemble scaled(double lambda) const;
  ParticleEnsemble translated(std::span<const double> dx,
                              std::span<const double> dv) const;
  ParticleEnsemble permuted(std::span<const std::size_t> order) const;
  ParticleEnsemble subset(std::span<const std::size_t> indices) const;

  std::vector<double> mean_position() const;
  std::vector<double> mean_velocity() const;

  friend bool operator==(const ParticleEnsemble&,
                         const ParticleEnsemble&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> x_;
  std::vector<double> v_;
};

/// Uniform grid t_k = k * step, k = 0..n_steps.
std::vector<double> uniform_grid(double horizon, std::size_t n_steps);

class FlowView;

/// Time grid plus one ensemble per node; particle i at every node is the same
/// trajectory sample. Immutable after construction; every instance carries a
/// process-unique id used to key caches.
class MeasureFlow {
 public:
  MeasureFlow(std::vector<double> grid, std::vector<ParticleEnsemble> snapshots);

  static MeasureFlow constant(const ParticleEnsemble& ens,
                              std::vector<double> grid);

  std::size_t nodes() const { return grid_.size(); }
  std::size_t particles() const { return snaps_.front().size(); }
  std::size_t dim() const { return snaps_.front().dim(); }
  double horizon() const { return grid_.back(); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<ParticleEnsemble>& snapshots() const { return snaps_; }
  const ParticleEnsemble& at(std::size_t k) const { return snaps_.at(k); }
  double time(std::size_t k) const { return grid_.at(k); }
  std::uint64_t id() const { return id_; }

  /// Nonzero when the grid is uniform; time gaps are then computed as
  /// exact multiples of it.
  double base_step() const { return base_step_; }
  double time_gap(std::size_t j, std::size_t k) const;

  /// Largest node index with grid[k] <= t (with a relative slack of 1e-12).
  /// Throws when t lies outside [t_0, t_M].
  std::size_t node_at(double t) const;

  FlowView view(std::size_t k) const;

 private:
  std::vector<double> grid_;
  std::vector<ParticleEnsemble> snaps_;
  double base_step_ = 0.0;
  std::uint64_t id_ = 0;
};

/// Non-anticipative window on a flow: only nodes 0..index() are reachable.
/// Also used over a flow that is still being built (id() == 0 then).
class FlowView {
 public:
  FlowView(const std::vector<double>& grid,
           const std::vector<ParticleEnsemble>& snapshots, std::size_t k,
           std::uint64_t id = 0);

  std::size_t index() const { return k_; }
  double time() const { return (*grid_)[k_]; }
  double time_at(std::size_t j) const;
  const ParticleEnsemble& current() const { return (*snaps_)[k_]; }
  /// Snapshot j <= index(); throws for future nodes.
  const ParticleEnsemble& at(std::size_t j) const;
  std::uint64_t flow_id() const { return id_; }
  /// The same window cut at node j <= index().
  FlowView prefix(std::size_t j) const;
  /// sup_{s <= t} M_p(mu_s) over the visible nodes.
  double sup_moment(double p) const;

 private:
  const std::vector<double>* grid_;
  const std::vector<ParticleEnsemble>* snaps_;
  std::size_t k_;
  std::uint64_t id_;
};

/// m leaders in R^d: positions Y and velocities W, flat m x d arrays.
struct LeaderState {
  std::size_t m = 0;
  std::size_t d = 0;
  std::vector<double> y;
  std::vector<double> w;

  LeaderState() = default;
  LeaderState(std::size_t leaders, std::size_t dim);
  LeaderState(std::size_t dim, std::vector<double> positions,
              std::vector<double> velocities);

  std::span<const double> pos(std::size_t i) const { return {y.data() + i * d, d}; }
  std::span<const double> vel(std::size_t i) const { return {w.data() + i * d, d}; }
  /// Euclidean norm of the flattened (Y, W).
  double norm() const;

  friend bool operator==(const LeaderState&, const LeaderState&) = default;
};

/// Leader states on a time grid; W at node k is the evaluated right-hand side.
struct LeaderTrajectory {
  std::vector<double> grid;
  std::vector<LeaderState> states;
};

/// User-supplied Young function Phi with Phi(0) = 0. Convexity is not checked
/// globally; check_on_grid only samples nonnegativity and monotonicity.
struct YoungFunction {
  std::string name;
  std::function<double(double)> phi;
  bool dominated_by_square = false;

  bool check_on_grid(double upper, std::size_t samples) const;

  static YoungFunction identity();
  /// x log(1 + x)
  static YoungFunction x_log1p();
  /// x^2 min(1, x)
  static YoungFunction truncated_cubic();
};

/// (1/N) sum |z_i|^p, summed left to right over the particle index.
double moment_p(const ParticleEnsemble& ens, double p);

/// max of moment_p over nodes with time <= t.
double sup_moment(const MeasureFlow& flow, double p, double t);

/// (1/N) sum Phi(|z_i|^p).
double young_moment(const ParticleEnsemble& ens, const YoungFunction& phi,
                    double p);

using DistanceFn =
    std::function<double(const ParticleEnsemble&, const ParticleEnsemble&)>;

/// max over node pairs of wp(mu_t, mu_s) / |t - s|^{gamma_p},
/// gamma_p = 1 / max(2, p).
double holder_ratio(const MeasureFlow& flow, double p, const DistanceFn& wp);

double holder_exponent(double p);

}  // namespace mfc
