#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mfc/drift.hpp"
#include "mfc/sde.hpp"
#include "mfc/test_functions.hpp"

namespace mfc {

struct PicardOptions {
  GapMetric metric = GapMetric::automatic;
  std::size_t exact_max_n = 256;
  /// Route the drift through clamp_drift(f, truncation_cap).
  bool truncate = false;
  double truncation_cap = 1e6;
  /// Called after every iteration with (iteration, gap).
  std::function<void(std::size_t, double)> on_iteration;
};

struct PicardReport {
  std::size_t iterations = 0;
  std::vector<double> gaps;
  bool converged = false;
  MeasureFlow final_flow;
};

/// Fixed point of nu -> flow of the SDE driven by f[., nu], started from the
/// constant flow at `init`. All iterates share one set of Brownian paths
/// (generated from cfg, or `paths` when given), so the map is deterministic.
/// Non-convergence is reported, not thrown.
PicardReport picard_solve(const DriftField& f, const ParticleEnsemble& init,
                          const SimConfig& cfg, double tol, std::size_t max_iter,
                          const PicardOptions& opts = {},
                          const BrownianPaths* paths = nullptr);

/// |<psi, mu_n> - <psi, mu_0> - sum_k dt_k <v.grad_x psi + f.grad_v psi +
/// sigma lap_v psi, mu_k>|, left-endpoint quadrature over k < n.
double weakform_residual(const MeasureFlow& flow, const DriftField& f, double sigma,
                         const TestFunction& psi, std::size_t t_index);

/// Solves for f and each f_j under one set of Brownian paths and returns the
/// paired sup-in-time distance of every mu^j to mu. The f_j must declare the
/// same K and D.
std::vector<double> stability_experiment(const std::vector<DriftField>& f_seq,
                                         const DriftField& f, const ParticleEnsemble& init,
                                         const SimConfig& cfg, double tol,
                                         std::size_t max_iter, const PicardOptions& opts = {});

struct MomentCertificate {
  double sup_moment = 0.0;        ///< sup_t M_p(mu_t)
  double sup_young_moment = 0.0;  ///< sup_t M_Phi(mu_t) with Phi applied to |z|^p
  double holder_ratio = 0.0;      ///< exponent 1 / max(2, p)
  bool pass = false;              ///< all three finite
};

MomentCertificate moment_certificate(const MeasureFlow& flow, double p, const YoungFunction& phi,
                                     GapMetric metric = GapMetric::paired);

}  // namespace mfc
