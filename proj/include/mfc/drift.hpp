#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mfc/phase_space.hpp"
#include "mfc/wasserstein.hpp"

namespace mfc {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class KernelSymmetry { even, odd, none };

/// Pairwise interaction kernel K(dx, dv) -> R^d. Position-only kernels (the
/// leader-side K_{2,j}) ignore dv and are evaluated with an empty span.
///
/// `lipschitz` is the Lipschitz constant with respect to the Euclidean norm
/// of the concatenated (dx, dv); `bound` is sup |K|. Either may be infinite,
/// in which case the kernel is only meant for closed-form tests.
struct InteractionKernel {
  using Eval = std::function<void(std::span<const double> dx,
                                  std::span<const double> dv, std::span<double> out)>;

  std::string name;
  Eval eval;
  double lipschitz = kUnbounded;
  double bound = kUnbounded;
  KernelSymmetry symmetry = KernelSymmetry::none;
  bool uses_velocity = true;
  bool is_zero = false;

  bool bounded() const { return bound < kUnbounded; }
  std::vector<double> operator()(std::span<const double> dx,
                                 std::span<const double> dv) const;
};

/// Kernel library. `gain` scales the kernel and its declared constants.
namespace kernels {
InteractionKernel zero();
InteractionKernel constant(std::vector<double> value);
/// K = gain * dv (Cucker-Smale alignment without weight; unbounded)
InteractionKernel alignment(double gain = 1.0);
/// K = gain * tanh(dv) componentwise
InteractionKernel bounded_alignment(std::size_t dim, double gain = 1.0);
/// K = gain * dx (unbounded)
InteractionKernel attraction(double gain = 1.0);
/// K = gain * dx / (1 + |dx|^2)
InteractionKernel bounded_attraction(double gain = 1.0);
/// K = gain * tanh(dx) componentwise
InteractionKernel bounded_tanh_attraction(std::size_t dim, double gain = 1.0);
}  // namespace kernels

/// Builds a library kernel by name. Recognised names: zero, constant,
/// alignment, bounded_alignment, attraction, bounded_attraction,
/// tanh_attraction. `params` holds the gain (or the constant vector).
InteractionKernel make_kernel(const std::string& name, std::span<const double> params,
                              std::size_t dim);
std::vector<std::string> kernel_names();

/// Declared constants of a drift field. K and beta belong to the growth
/// bound, alpha to the Hoelder bound, D to the dissipativity bound and p is
/// the Wasserstein order.
struct DriftConstants {
  double K = 1.0;
  double beta = 0.0;
  double alpha = 1.0;
  double D = 0.0;
  double p = 2.0;
};

/// Nonlocal drift v[t, mu](z) -> R^d. Evaluation sees the flow only through a
/// FlowView, so it cannot look at snapshots after the current time.
class DriftField {
 public:
  using Eval = std::function<void(const FlowView& flow, std::span<const double> x,
                                  std::span<const double> v, std::span<double> out)>;

  DriftField(std::string name, std::size_t dim, Eval eval, DriftConstants constants,
             bool measure_dependent = true);

  void eval(const FlowView& flow, std::span<const double> x, std::span<const double> v,
            std::span<double> out) const {
    eval_(flow, x, v, out);
  }
  std::vector<double> operator()(const FlowView& flow, const PhasePoint& z) const;

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const DriftConstants& constants() const { return constants_; }
  bool measure_dependent() const { return measure_dependent_; }

 private:
  std::string name_;
  std::size_t dim_;
  Eval eval_;
  DriftConstants constants_;
  bool measure_dependent_;
};

/// Leader coupling w[t, H](z) -> R^d. `history` holds leader states at nodes
/// 0..k; its back() is the current state, with W already evaluated.
struct LeaderCouplingField {
  using Eval = std::function<void(std::span<const LeaderState> history,
                                  std::span<const double> x, std::span<const double> v,
                                  std::span<double> out)>;
  std::string name;
  Eval eval;
  double K_w = 0.0;
  double L_w = 0.0;
  bool is_zero = false;
};

/// Leader field F[t, mu](Y) -> R^{m d}. `history` holds leader positions at
/// nodes 0..k (back() is current; its W is not yet known).
struct LeaderField {
  using Eval = std::function<void(const FlowView& flow,
                                  std::span<const LeaderState> history,
                                  std::span<double> out)>;
  std::string name;
  Eval eval;
  double K_F = 0.0;
  double L_F = 0.0;
};

/// (1/N) sum_i K(xi_i - x, nu_i - v).
std::vector<double> kernel_convolution_drift(const InteractionKernel& kernel,
                                             const ParticleEnsemble& ens,
                                             const PhasePoint& z);
void kernel_convolution_into(const InteractionKernel& kernel, const ParticleEnsemble& ens,
                             std::span<const double> x, std::span<const double> v,
                             std::span<double> out);

/// (1/m) sum_i K12(Y_i - x, W_i - v); zero vector when m = 0.
std::vector<double> leader_coupling_drift(const InteractionKernel& kernel,
                                          const LeaderState& leaders, const PhasePoint& z);
void leader_coupling_into(const InteractionKernel& kernel, const LeaderState& leaders,
                          std::span<const double> x, std::span<const double> v,
                          std::span<double> out);

/// Field library.
namespace fields {
DriftField zero(std::size_t dim);
/// v[t, mu](z) = (K * mu_t)(z), with constants derived from the kernel.
DriftField kernel_drift(const InteractionKernel& kernel, std::size_t dim, double p = 2.0);
/// f(z) = -gamma v; measure independent, unbounded.
DriftField linear_damping(std::size_t dim, double gamma = 1.0);
/// f(t, z) = value, measure independent.
DriftField constant(std::vector<double> value);
/// base + eps * c(z), c(z) = tanh(x) componentwise (bounded by sqrt(d),
/// 1-Lipschitz). Declared constants are those of `base` widened by
/// max(|eps|, |eps_budget|), so a family sharing one budget shares constants.
DriftField perturbed(const DriftField& base, double eps, double eps_budget = 0.0);
}  // namespace fields

LeaderCouplingField leader_coupling_from_kernel(const InteractionKernel& k12);
LeaderCouplingField zero_leader_coupling();
/// F_j = (K21 * mu_t)(Y_j) + (1/m) sum_i K22(Y_i - Y_j).
LeaderField leader_field_from_kernels(const InteractionKernel& k21,
                                      const InteractionKernel& k22);
LeaderField zero_leader_field();

/// Cubic cutoff equal to 1 on (-inf, cap] and 0 on [cap + 1, inf).
double truncation_weight(double r, double cap);

/// v_N[t, mu](z) = v[t, mu](z) * eta(sup_{s <= t} M_p(mu_s)).
DriftField clamp_drift(const DriftField& field, double cap);

/// Result of a sampled assumption check.
struct ValidationReport {
  std::string check;
  bool pass = true;
  double worst_ratio = 0.0;   ///< largest sampled quotient
  double threshold = 0.0;     ///< quotient limit (declared constant x (1 + tol))
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::string offender;       ///< human-readable worst sample
};

inline constexpr double kValidationTol = 1e-9;

/// max |f(t, mu, z)| / (1 + |x|^{beta/3} + |v|^beta + sup_T M_p^{1/p}) <= K.
ValidationReport validate_sublinearity(const DriftField& f, const MeasureFlow& flow,
                                       std::span<const PhasePoint> sample_z,
                                       std::span<const double> sample_t);

/// Sampled quotient |f(z1) - f(z2)| / (|dx|^{alpha/3} + |dv|^alpha) <= L on
/// pairs inside the ball of radius R. Coincident pairs are skipped.
ValidationReport validate_hoelder(const DriftField& f, const MeasureFlow& flow,
                                  std::span<const std::pair<PhasePoint, PhasePoint>> pairs,
                                  double L, double alpha, double R);

/// Smallest L for which a kernel drift with Lipschitz kernel passes the
/// anisotropic Hoelder check (alpha = 1) on the ball of radius R:
/// L_ker * max(1, (2R)^{2/3}).
double kernel_drift_hoelder_constant(double kernel_lipschitz, double radius);

/// Sufficient dissipativity condition:
/// |f[t, mu1](z1) - f[t, mu2](z2)| <= D (sup_{s <= t} W_p(mu1_s, mu2_s) + |z1 - z2|).
/// The flows must share the initial snapshot.
ValidationReport validate_dissipativity_v3pp(
    const DriftField& f, const MeasureFlow& flow1, const MeasureFlow& flow2,
    std::span<const std::pair<PhasePoint, PhasePoint>> pairs,
    std::span<const std::size_t> nodes, GapMetric metric = GapMetric::exact);

/// Latin-hypercube points in the box [-half_width, half_width]^{2d}.
std::vector<PhasePoint> latin_hypercube(std::size_t n, std::size_t dim, double half_width,
                                        std::uint64_t seed);

}  // namespace mfc
