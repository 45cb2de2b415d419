#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfc/drift.hpp"
#include "mfc/phase_space.hpp"

namespace mfc {

enum class ControlClass { general, ev, sv };

/// Scalar features of a measure. Each non-constant feature is s(raw) with
/// s(x) = x / (1 + |x|), where raw is 1-Lipschitz in W_1 (hence in every W_p),
/// so each feature is bounded by 1 and 1-Lipschitz.
enum class FeatureKind {
  constant,     ///< 1
  mean_x,       ///< s(mean of x_k)
  mean_v,       ///< s(mean of v_k)
  mean_radius,  ///< s(mean of |z|)
};

struct Feature {
  FeatureKind kind = FeatureKind::constant;
  std::size_t component = 0;
};

/// g(mu) = gain * (f_1(mu), ..., f_l(mu)).
struct FeatureMap {
  std::vector<Feature> features;
  double gain = 1.0;

  std::size_t size() const { return features.size(); }
  void evaluate(const ParticleEnsemble& ens, std::span<double> out) const;
  std::vector<double> operator()(const ParticleEnsemble& ens) const;
  /// Lipschitz constant of g in W_p: gain * sqrt(#non-constant features).
  double lipschitz() const;
  /// |g(delta_0)| = gain * sqrt(#constant features).
  double bound_at_dirac() const;

  static FeatureMap constant_only(double gain = 1.0);
  /// constant, mean_x, mean_v per component, mean_radius.
  static FeatureMap standard(std::size_t dim, double gain = 1.0);
};

/// Control u(t, mu) in R^{m d}. Class sv is u = h(t) g(mu_t) with h piecewise
/// constant on K equal bins of [0, T] (right-open, the last one closed); each
/// bin is an (m d) x l row-major matrix. Classes ev and general carry user
/// callbacks with declared constants.
struct ControlSpec {
  using EvFn = std::function<void(double t, const ParticleEnsemble& mu, std::span<double> out)>;
  using GeneralFn = std::function<void(const FlowView& flow, std::span<double> out)>;

  ControlClass cls = ControlClass::sv;
  std::size_t m = 0;
  std::size_t d = 1;
  double T = 1.0;
  std::vector<std::vector<double>> h_bins;
  FeatureMap g;
  double M_h = kUnbounded;

  EvFn ev;
  GeneralFn general;
  double declared_M_u = 0.0;
  double declared_L_u = 0.0;

  std::size_t dim() const { return m * d; }
  std::size_t bins() const { return h_bins.size(); }
  /// Bin index containing t; throws outside [0, T].
  std::size_t bin_of(double t) const;

  double M_g() const { return g.bound_at_dirac(); }
  double L_g() const { return g.lipschitz(); }
  /// |u(t, delta_0)| <= M_u.
  double M_u() const;
  /// Componentwise budget |u_j(mu) - u_j(nu)| <= (L_u / (m d)) sup W_p.
  double L_u() const;

  /// Flattened h entries (bin-major) and the inverse.
  std::vector<double> parameters() const;
  ControlSpec with_parameters(std::span<const double> params) const;

  /// Throws on shape errors.
  void validate() const;

  static ControlSpec zero(std::size_t m, std::size_t d, double T);
  static ControlSpec sv(std::size_t m, std::size_t d, double T, std::size_t n_bins,
                        FeatureMap g, double M_h);
  /// u(t, mu) = c for every t and mu (sv with one constant feature).
  static ControlSpec constant(std::size_t m, std::size_t d, double T, std::vector<double> c,
                              double M_h = kUnbounded);
  static ControlSpec from_ev(std::size_t m, std::size_t d, double T, EvFn fn, double M_u,
                             double L_u);
  static ControlSpec from_general(std::size_t m, std::size_t d, double T, GeneralFn fn,
                                  double M_u, double L_u);
};

void evaluate_control_into(const ControlSpec& u, const FlowView& flow, std::span<double> out);
std::vector<double> evaluate_control(const ControlSpec& u, const FlowView& flow);
std::vector<double> evaluate_control(const ControlSpec& u, double t, const MeasureFlow& flow);

double frobenius_norm(std::span<const double> a);

/// Shrinks every h bin to Frobenius norm <= M_h, preserving direction.
/// Idempotent; non-sv controls are returned unchanged.
ControlSpec project_admissible(const ControlSpec& u);

/// Checks bin norms against M_h and |u(t, delta_0)| <= M_u at every bin.
ValidationReport validate_control_bound(const ControlSpec& u);

/// Checks the componentwise Lipschitz budget on flow pairs at the given nodes.
ValidationReport validate_control_lipschitz(
    const ControlSpec& u, std::span<const std::pair<MeasureFlow, MeasureFlow>> flows,
    double p, GapMetric metric = GapMetric::exact);

}  // namespace mfc
