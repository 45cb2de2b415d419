#include "mfc/pdeode.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "mfc/error.hpp"

namespace mfc {

namespace {

void leader_rhs(const LeaderField& F, const ControlSpec& u, const FlowView& view,
                std::span<const LeaderState> history, std::span<double> out) {
  F.eval(view, history, out);
  if (u.m > 0) {
    std::vector<double> uval(out.size());
    evaluate_control_into(u, view, uval);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += uval[j];
  }
  for (double e : out)
    if (!std::isfinite(e))
      throw Error("leader solve: non-finite right-hand side at node " +
                  std::to_string(view.index()));
}

}  // namespace

void extend_leader_states(const LeaderField& F, const ControlSpec& u, const FlowView& view,
                          LeaderScheme scheme, std::vector<LeaderState>& states,
                          std::size_t& evaluated) {
  if (states.empty()) throw Error("leader solve: missing initial state");
  const std::size_t n = states.front().m * states.front().d;
  if (u.m > 0 && u.dim() != n) throw Error("leader solve: control shape does not match leaders");
  const std::size_t target = view.index();
  // `evaluated` counts the leading nodes whose W is final.
  while (evaluated <= target) {
    const std::size_t k = evaluated;
    if (states.size() <= k) {
      // Advance from node k-1 to k.
      const LeaderState& prev = states[k - 1];
      const double dt = view.time_at(k) - view.time_at(k - 1);
      LeaderState next = prev;
      if (scheme == LeaderScheme::euler) {
        for (std::size_t j = 0; j < n; ++j) next.y[j] = prev.y[j] + dt * prev.w[j];
      } else {
        LeaderState pred = prev;
        for (std::size_t j = 0; j < n; ++j) pred.y[j] = prev.y[j] + dt * prev.w[j];
        std::vector<LeaderState> hist(states.begin(), states.end());
        hist.push_back(pred);
        std::vector<double> w_pred(n);
        leader_rhs(F, u, view.prefix(k), hist, w_pred);
        for (std::size_t j = 0; j < n; ++j)
          next.y[j] = prev.y[j] + 0.5 * dt * (prev.w[j] + w_pred[j]);
      }
      std::fill(next.w.begin(), next.w.end(), 0.0);
      states.push_back(std::move(next));
    }
    std::vector<double> w(n);
    leader_rhs(F, u, view.prefix(k), std::span<const LeaderState>(states.data(), k + 1), w);
    states[k].w = std::move(w);
    ++evaluated;
  }
}

LeaderTrajectory solve_leader_ode(const LeaderField& F, const ControlSpec& u,
                                  const MeasureFlow& flow, const LeaderState& Y0,
                                  LeaderScheme scheme) {
  std::vector<LeaderState> states;
  LeaderState start = Y0;
  std::fill(start.w.begin(), start.w.end(), 0.0);
  states.push_back(std::move(start));
  std::size_t evaluated = 0;
  extend_leader_states(F, u, flow.view(flow.nodes() - 1), scheme, states, evaluated);
  return {flow.grid(), std::move(states)};
}

double leader_growth_constant(const LeaderField& F, const ControlSpec& u,
                              const LeaderState& Y0, double T) {
  double y0 = 0.0;
  for (double e : Y0.y) y0 += e * e;
  return (std::sqrt(y0) + T * (F.K_F + u.M_u())) * std::exp(F.K_F * T);
}

DriftField combined_drift(const DriftField& v, const LeaderCouplingField& w,
                          const LeaderField& F, const ControlSpec& u, const LeaderState& Y0,
                          double T, LeaderScheme scheme) {
  if (w.is_zero) return v;
  const double C1 = leader_growth_constant(F, u, Y0, T);
  const double C2 = (F.L_F + u.L_u()) * T * std::exp(F.L_F * T);
  DriftConstants c = v.constants();
  c.K = c.K + w.K_w * (1.0 + F.K_F) * (1.0 + C1 + F.K_F + u.M_u());
  c.D = c.D + w.L_w * (1.0 + C2 * (1.0 + F.L_F) + F.L_F + u.L_u());

  struct Entry {
    std::vector<LeaderState> states;
    std::size_t evaluated = 0;
    // Immutable copy handed to evaluators; replaced after every extension.
    std::shared_ptr<const std::vector<LeaderState>> published;
  };
  struct Cache {
    std::mutex mutex;
    std::map<std::uint64_t, Entry> entries;
  };
  auto cache = std::make_shared<Cache>();
  LeaderState start = Y0;
  std::fill(start.w.begin(), start.w.end(), 0.0);

  auto eval = [v, w, F, u, start, scheme, cache](const FlowView& view, std::span<const double> x,
                                                 std::span<const double> vel,
                                                 std::span<double> out) {
    v.eval(view, x, vel, out);
    const std::size_t k = view.index();
    std::shared_ptr<const std::vector<LeaderState>> history;
    if (view.flow_id() != 0) {
      std::lock_guard lock(cache->mutex);
      auto it = cache->entries.find(view.flow_id());
      if (it == cache->entries.end()) {
        if (cache->entries.size() >= 8) cache->entries.erase(cache->entries.begin());
        it = cache->entries.emplace(view.flow_id(), Entry{{start}, 0, nullptr}).first;
      }
      Entry& e = it->second;
      if (e.evaluated <= k) {
        extend_leader_states(F, u, view, scheme, e.states, e.evaluated);
        e.published = std::make_shared<const std::vector<LeaderState>>(e.states);
      }
      history = e.published;
    } else {
      std::vector<LeaderState> local{start};
      std::size_t evaluated = 0;
      extend_leader_states(F, u, view, scheme, local, evaluated);
      history = std::make_shared<const std::vector<LeaderState>>(std::move(local));
    }
    std::vector<double> extra(out.size());
    w.eval(std::span<const LeaderState>(history->data(), k + 1), x, vel, extra);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += extra[j];
  };
  return DriftField(v.name() + "+leaders", v.dim(), std::move(eval), c, true);
}

CoupledSolution solve_coupled(const CoupledModel& model, const ControlSpec& u,
                              const ParticleEnsemble& init, const SimConfig& cfg, double tol,
                              std::size_t max_iter, const PicardOptions& opts,
                              const BrownianPaths* paths) {
  const DriftField G =
      combined_drift(model.v, model.w, model.F, u, model.Y0, cfg.T, model.scheme);
  PicardReport rep = picard_solve(G, init, cfg, tol, max_iter, opts, paths);
  LeaderTrajectory leaders = solve_leader_ode(model.F, u, rep.final_flow, model.Y0, model.scheme);
  MeasureFlow flow = rep.final_flow;
  return {std::move(flow), std::move(leaders), std::move(rep)};
}

double leader_distance(const LeaderTrajectory& a, const LeaderTrajectory& b) {
  if (a.states.size() != b.states.size()) throw Error("leader distance: grids differ");
  double best = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const auto& sa = a.states[k];
    const auto& sb = b.states[k];
    if (sa.y.size() != sb.y.size()) throw Error("leader distance: leader counts differ");
    double s = 0.0;
    for (std::size_t j = 0; j < sa.y.size(); ++j) {
      s += (sa.y[j] - sb.y[j]) * (sa.y[j] - sb.y[j]);
      s += (sa.w[j] - sb.w[j]) * (sa.w[j] - sb.w[j]);
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

std::vector<ControlGap> control_stability(const std::vector<ControlSpec>& u_seq,
                                          const ControlSpec& u, const CoupledModel& model,
                                          const ParticleEnsemble& init, const SimConfig& cfg,
                                          double tol, std::size_t max_iter,
                                          const PicardOptions& opts) {
  for (std::size_t j = 0; j < u_seq.size(); ++j)
    if (u_seq[j].M_u() != u.M_u() || u_seq[j].L_u() != u.L_u())
      throw Error("control stability: control " + std::to_string(j) +
                  " declares different (M_u, L_u)");
  const BrownianPaths paths = generate_brownian(cfg);
  const CoupledSolution base = solve_coupled(model, u, init, cfg, tol, max_iter, opts, &paths);
  if (!base.picard.converged)
    throw ConvergenceError("control stability: reference control did not converge");
  const double p = model.v.constants().p;
  std::vector<ControlGap> out;
  for (std::size_t j = 0; j < u_seq.size(); ++j) {
    const CoupledSolution s = solve_coupled(model, u_seq[j], init, cfg, tol, max_iter, opts, &paths);
    if (!s.picard.converged)
      throw ConvergenceError("control stability: control " + std::to_string(j) +
                             " did not converge");
    out.push_back({sup_flow_distance(s.flow, base.flow, p, GapMetric::paired),
                   leader_distance(s.leaders, base.leaders)});
  }
  return out;
}

}  // namespace mfc
