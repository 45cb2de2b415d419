#include "mfc/meanfield.hpp"

#include <cmath>

#include "mfc/error.hpp"
#include "mfc/parallel.hpp"

namespace mfc {

PicardReport picard_solve(const DriftField& f, const ParticleEnsemble& init,
                          const SimConfig& cfg, double tol, std::size_t max_iter,
                          const PicardOptions& opts, const BrownianPaths* paths) {
  if (!(tol > 0.0)) throw Error("picard: tol must be > 0");
  cfg.validate();
  if (init.size() != cfg.N) throw Error("picard: initial ensemble size differs from N");
  if (f.dim() != cfg.d) throw Error("picard: drift dimension differs from d");
  std::optional<BrownianPaths> own;
  if (!paths) paths = &own.emplace(generate_brownian(cfg));

  const DriftField drift = opts.truncate ? clamp_drift(f, opts.truncation_cap) : f;
  const double p = f.constants().p;
  PicardReport rep{0, {}, false, MeasureFlow::constant(init, cfg.grid())};
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const MeasureFlow& nu = rep.final_flow;
    MeasureFlow next = simulate_frozen(
        [&](std::size_t k, double, std::span<const double> x, std::span<const double> v,
            std::span<double> out) { drift.eval(nu.view(k), x, v, out); },
        init, cfg, *paths);
    const double gap = sup_flow_distance(nu, next, p, opts.metric, opts.exact_max_n);
    rep.gaps.push_back(gap);
    rep.iterations = it;
    rep.final_flow = std::move(next);
    if (opts.on_iteration) opts.on_iteration(it, gap);
    if (gap < tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

double weakform_residual(const MeasureFlow& flow, const DriftField& f, double sigma,
                         const TestFunction& psi, std::size_t t_index) {
  if (!psi.complete()) throw Error("weak form: test function lacks a derivative callback");
  if (t_index < 1 || t_index >= flow.nodes())
    throw Error("weak form: t_index must lie in [1, nodes)");
  if (f.dim() != flow.dim()) throw Error("weak form: drift dimension differs from the flow");
  const std::size_t n = flow.particles(), d = flow.dim();
  auto average = [&](const ParticleEnsemble& ens, auto&& g) {
    std::vector<double> vals(n);
    parallel_for(n, [&](std::size_t i) { vals[i] = g(ens.x(i), ens.v(i)); });
    double s = 0.0;
    for (double e : vals) s += e;
    return s / static_cast<double>(n);
  };
  auto value = [&](auto x, auto v) { return psi.value(x, v); };
  double integral = 0.0;
  for (std::size_t k = 0; k < t_index; ++k) {
    const auto view = flow.view(k);
    const double dt = flow.time_gap(k, k + 1);
    const double gen = average(flow.at(k), [&](auto x, auto v) {
      std::vector<double> gx(d), gv(d), fv(d);
      psi.grad_x(x, v, gx);
      psi.grad_v(x, v, gv);
      f.eval(view, x, v, fv);
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += v[j] * gx[j] + fv[j] * gv[j];
      if (sigma != 0.0) s += sigma * psi.lap_v(x, v);
      return s;
    });
    integral += dt * gen;
  }
  return std::abs(average(flow.at(t_index), value) - average(flow.at(0), value) - integral);
}

std::vector<double> stability_experiment(const std::vector<DriftField>& f_seq,
                                         const DriftField& f, const ParticleEnsemble& init,
                                         const SimConfig& cfg, double tol,
                                         std::size_t max_iter, const PicardOptions& opts) {
  for (std::size_t j = 1; j < f_seq.size(); ++j) {
    const auto& a = f_seq[0].constants();
    const auto& b = f_seq[j].constants();
    if (a.K != b.K || a.D != b.D)
      throw Error("stability: drift " + std::to_string(j) +
                  " declares constants different from drift 0");
  }
  const BrownianPaths paths = generate_brownian(cfg);
  const PicardReport base = picard_solve(f, init, cfg, tol, max_iter, opts, &paths);
  if (!base.converged) throw ConvergenceError("stability: reference drift did not converge");
  std::vector<double> gaps;
  for (std::size_t j = 0; j < f_seq.size(); ++j) {
    const PicardReport r = picard_solve(f_seq[j], init, cfg, tol, max_iter, opts, &paths);
    if (!r.converged)
      throw ConvergenceError("stability: drift " + std::to_string(j) + " did not converge");
    gaps.push_back(
        sup_flow_distance(r.final_flow, base.final_flow, f.constants().p, GapMetric::paired));
  }
  return gaps;
}

MomentCertificate moment_certificate(const MeasureFlow& flow, double p, const YoungFunction& phi,
                                     GapMetric metric) {
  MomentCertificate c;
  c.sup_moment = sup_moment(flow, p, flow.horizon());
  for (std::size_t k = 0; k < flow.nodes(); ++k)
    c.sup_young_moment = std::max(c.sup_young_moment, young_moment(flow.at(k), phi, p));
  c.holder_ratio =
      flow.nodes() < 2
          ? 0.0
          : holder_ratio(flow, p, [&](const ParticleEnsemble& a, const ParticleEnsemble& b) {
              return ensemble_distance(a, b, p, metric);
            });
  c.pass = std::isfinite(c.sup_moment) && std::isfinite(c.sup_young_moment) &&
           std::isfinite(c.holder_ratio);
  return c;
}

}  // namespace mfc
