#pragma once

#include <cstddef>
#include <vector>

#include "mfc/control.hpp"
#include "mfc/drift.hpp"
#include "mfc/meanfield.hpp"

namespace mfc {

enum class LeaderScheme { euler, heun };

/// Y' = F[t, mu](Y) + u(t, mu) on the flow's grid; W at node k is the
/// evaluated right-hand side there. Only nodes 0..k of the flow are used to
/// produce Y up to node k.
LeaderTrajectory solve_leader_ode(const LeaderField& F, const ControlSpec& u,
                                  const MeasureFlow& flow, const LeaderState& Y0,
                                  LeaderScheme scheme = LeaderScheme::euler);

/// Extends `states` (leader states at nodes 0..states.size()-1, the first one
/// holding Y0) so that it covers nodes 0..view.index() with W evaluated.
void extend_leader_states(const LeaderField& F, const ControlSpec& u, const FlowView& view,
                          LeaderScheme scheme, std::vector<LeaderState>& states,
                          std::size_t& evaluated);

/// Gronwall constant C_1 = (|Y0| + T (K_F + M_u)) e^{K_F T} with
/// sup_t |Y| <= C_1 (1 + sup_t M_p^{1/p}).
double leader_growth_constant(const LeaderField& F, const ControlSpec& u,
                              const LeaderState& Y0, double T);

/// G[t, mu](z) = v[t, mu](z) + w[t, S[mu, u]](z), where S[mu, u] solves the
/// leader equation against mu. Leader solves are cached per flow id.
DriftField combined_drift(const DriftField& v, const LeaderCouplingField& w,
                          const LeaderField& F, const ControlSpec& u, const LeaderState& Y0,
                          double T, LeaderScheme scheme = LeaderScheme::euler);

struct CoupledModel {
  DriftField v;
  LeaderCouplingField w;
  LeaderField F;
  LeaderState Y0;
  LeaderScheme scheme = LeaderScheme::euler;
};

struct CoupledSolution {
  MeasureFlow flow;
  LeaderTrajectory leaders;
  PicardReport picard;
};

CoupledSolution solve_coupled(const CoupledModel& model, const ControlSpec& u,
                              const ParticleEnsemble& init, const SimConfig& cfg, double tol,
                              std::size_t max_iter, const PicardOptions& opts = {},
                              const BrownianPaths* paths = nullptr);

struct ControlGap {
  double flow_gap = 0.0;    ///< sup_t paired W_p(mu^j_t, mu_t)
  double leader_gap = 0.0;  ///< sup_t |H^j(t) - H(t)|
  double total() const { return flow_gap + leader_gap; }
};

/// Solves the coupled system for u and each u_j under one set of Brownian
/// paths. Controls must share (M_u, L_u).
std::vector<ControlGap> control_stability(const std::vector<ControlSpec>& u_seq,
                                          const ControlSpec& u, const CoupledModel& model,
                                          const ParticleEnsemble& init, const SimConfig& cfg,
                                          double tol, std::size_t max_iter,
                                          const PicardOptions& opts = {});

/// sup_t |H_a(t) - H_b(t)| over a shared grid.
double leader_distance(const LeaderTrajectory& a, const LeaderTrajectory& b);

}  // namespace mfc
