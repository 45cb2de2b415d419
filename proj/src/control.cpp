#include "mfc/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfc/error.hpp"

namespace mfc {

namespace {

double squash(double x) { return x / (1.0 + std::abs(x)); }

}  // namespace

void FeatureMap::evaluate(const ParticleEnsemble& ens, std::span<double> out) const {
  if (out.size() != features.size()) throw Error("feature map: output size mismatch");
  const std::size_t n = ens.size(), d = ens.dim();
  if (n == 0) throw Error("empty measure");
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t f = 0; f < features.size(); ++f) {
    const Feature& ft = features[f];
    if (ft.kind != FeatureKind::constant && ft.kind != FeatureKind::mean_radius &&
        ft.component >= d)
      throw Error("feature map: component out of range");
    double raw = 0.0;
    switch (ft.kind) {
      case FeatureKind::constant:
        out[f] = gain;
        continue;
      case FeatureKind::mean_x:
        for (std::size_t i = 0; i < n; ++i) raw += ens.x(i)[ft.component];
        break;
      case FeatureKind::mean_v:
        for (std::size_t i = 0; i < n; ++i) raw += ens.v(i)[ft.component];
        break;
      case FeatureKind::mean_radius:
        for (std::size_t i = 0; i < n; ++i) raw += ens.norm(i);
        break;
    }
    out[f] = gain * squash(raw * inv);
  }
}

std::vector<double> FeatureMap::operator()(const ParticleEnsemble& ens) const {
  std::vector<double> out(size());
  evaluate(ens, out);
  return out;
}

double FeatureMap::lipschitz() const {
  std::size_t k = 0;
  for (const auto& f : features) k += f.kind != FeatureKind::constant;
  return std::abs(gain) * std::sqrt(static_cast<double>(k));
}

double FeatureMap::bound_at_dirac() const {
  std::size_t k = 0;
  for (const auto& f : features) k += f.kind == FeatureKind::constant;
  return std::abs(gain) * std::sqrt(static_cast<double>(k));
}

FeatureMap FeatureMap::constant_only(double gain) {
  return FeatureMap{{Feature{FeatureKind::constant, 0}}, gain};
}

FeatureMap FeatureMap::standard(std::size_t dim, double gain) {
  FeatureMap g;
  g.gain = gain;
  g.features.push_back({FeatureKind::constant, 0});
  for (std::size_t k = 0; k < dim; ++k) g.features.push_back({FeatureKind::mean_x, k});
  for (std::size_t k = 0; k < dim; ++k) g.features.push_back({FeatureKind::mean_v, k});
  g.features.push_back({FeatureKind::mean_radius, 0});
  return g;
}

std::size_t ControlSpec::bin_of(double t) const {
  const double slack = 1e-12 * std::max(1.0, T);
  if (!(t >= -slack && t <= T + slack))
    throw Error("control: time " + std::to_string(t) + " outside [0, T]");
  const std::size_t K = h_bins.size();
  if (K == 0) throw Error("control: no h bins");
  const double pos = std::clamp(t, 0.0, T) / T * static_cast<double>(K);
  return std::min(static_cast<std::size_t>(pos), K - 1);
}

double ControlSpec::M_u() const {
  if (cls != ControlClass::sv) return declared_M_u;
  return M_h * M_g();
}

double ControlSpec::L_u() const {
  if (cls != ControlClass::sv) return declared_L_u;
  const double lg = L_g();
  if (lg == 0.0) return 0.0;
  return static_cast<double>(m * d) * M_h * lg;
}

std::vector<double> ControlSpec::parameters() const {
  std::vector<double> out;
  for (const auto& b : h_bins) out.insert(out.end(), b.begin(), b.end());
  return out;
}

ControlSpec ControlSpec::with_parameters(std::span<const double> params) const {
  const std::size_t per = dim() * g.size();
  if (params.size() != per * h_bins.size()) throw Error("control: parameter count mismatch");
  ControlSpec u = *this;
  for (std::size_t b = 0; b < h_bins.size(); ++b)
    u.h_bins[b].assign(params.begin() + b * per, params.begin() + (b + 1) * per);
  return u;
}

void ControlSpec::validate() const {
  if (d == 0) throw Error("control: dimension must be >= 1");
  if (!(T > 0.0)) throw Error("control: horizon must be > 0");
  switch (cls) {
    case ControlClass::sv:
      if (h_bins.empty()) throw Error("control: sv class needs at least one bin");
      for (const auto& b : h_bins)
        if (b.size() != dim() * g.size()) throw Error("control: h bin has the wrong shape");
      if (!(M_h >= 0.0)) throw Error("control: M_h must be >= 0");
      break;
    case ControlClass::ev:
      if (!ev && m > 0) throw Error("control: ev class needs a callback");
      break;
    case ControlClass::general:
      if (!general && m > 0) throw Error("control: general class needs a callback");
      break;
  }
}

ControlSpec ControlSpec::zero(std::size_t m, std::size_t d, double T) {
  return sv(m, d, T, 1, FeatureMap::constant_only(), kUnbounded);
}

ControlSpec ControlSpec::sv(std::size_t m, std::size_t d, double T, std::size_t n_bins,
                            FeatureMap g, double M_h) {
  ControlSpec u;
  u.cls = ControlClass::sv;
  u.m = m;
  u.d = d;
  u.T = T;
  u.g = std::move(g);
  u.M_h = M_h;
  u.h_bins.assign(n_bins, std::vector<double>(m * d * u.g.size(), 0.0));
  u.validate();
  return u;
}

ControlSpec ControlSpec::constant(std::size_t m, std::size_t d, double T, std::vector<double> c,
                                  double M_h) {
  if (c.size() != m * d) throw Error("control: constant needs m*d entries");
  ControlSpec u = sv(m, d, T, 1, FeatureMap::constant_only(), M_h);
  u.h_bins[0] = std::move(c);
  return u;
}

ControlSpec ControlSpec::from_ev(std::size_t m, std::size_t d, double T, EvFn fn, double M_u,
                                 double L_u) {
  ControlSpec u;
  u.cls = ControlClass::ev;
  u.m = m;
  u.d = d;
  u.T = T;
  u.ev = std::move(fn);
  u.declared_M_u = M_u;
  u.declared_L_u = L_u;
  u.validate();
  return u;
}

ControlSpec ControlSpec::from_general(std::size_t m, std::size_t d, double T, GeneralFn fn,
                                      double M_u, double L_u) {
  ControlSpec u;
  u.cls = ControlClass::general;
  u.m = m;
  u.d = d;
  u.T = T;
  u.general = std::move(fn);
  u.declared_M_u = M_u;
  u.declared_L_u = L_u;
  u.validate();
  return u;
}

namespace {

// Time t may lie strictly between grid nodes; the flow enters through the
// latest snapshot at or before t.
void evaluate_at(const ControlSpec& u, double t, const FlowView& flow, std::span<double> out) {
  if (out.size() != u.dim()) throw Error("control: output size mismatch");
  if (u.m == 0) return;
  switch (u.cls) {
    case ControlClass::general:
      u.general(flow, out);
      return;
    case ControlClass::ev:
      u.ev(t, flow.current(), out);
      return;
    case ControlClass::sv: {
      const auto& h = u.h_bins[u.bin_of(t)];
      const std::size_t l = u.g.size();
      bool all_zero = true;
      for (double e : h) all_zero = all_zero && e == 0.0;
      if (all_zero) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      std::vector<double> g(l);
      u.g.evaluate(flow.current(), g);
      for (std::size_t r = 0; r < u.dim(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < l; ++c) s += h[r * l + c] * g[c];
        out[r] = s;
      }
      return;
    }
  }
}

}  // namespace

void evaluate_control_into(const ControlSpec& u, const FlowView& flow, std::span<double> out) {
  evaluate_at(u, flow.time(), flow, out);
}

std::vector<double> evaluate_control(const ControlSpec& u, const FlowView& flow) {
  std::vector<double> out(u.dim(), 0.0);
  evaluate_control_into(u, flow, out);
  return out;
}

std::vector<double> evaluate_control(const ControlSpec& u, double t, const MeasureFlow& flow) {
  std::vector<double> out(u.dim(), 0.0);
  evaluate_at(u, t, flow.view(flow.node_at(t)), out);
  return out;
}

double frobenius_norm(std::span<const double> a) {
  double s = 0.0;
  for (double e : a) s += e * e;
  return std::sqrt(s);
}

ControlSpec project_admissible(const ControlSpec& u) {
  if (u.cls != ControlClass::sv || !(u.M_h < kUnbounded)) return u;
  ControlSpec out = u;
  for (auto& b : out.h_bins) {
    const double n = frobenius_norm(b);
    if (n <= u.M_h) continue;
    const double scale = u.M_h / n;
    for (auto& e : b) e *= scale;
    // Rounding can leave the norm a hair above M_h; shrink until it is not.
    while (frobenius_norm(b) > u.M_h)
      for (auto& e : b) e = std::nextafter(e, 0.0);
  }
  return out;
}

ValidationReport validate_control_bound(const ControlSpec& u) {
  ValidationReport rep;
  rep.check = "control_bound";
  const double mu = u.M_u();
  rep.threshold = mu * (1.0 + kValidationTol);
  if (u.m == 0) return rep;
  const std::vector<double> grid{0.0};
  const std::vector<ParticleEnsemble> dirac{
      ParticleEnsemble(u.d, std::vector<double>(u.d, 0.0), std::vector<double>(u.d, 0.0))};
  std::vector<double> times;
  if (u.cls == ControlClass::sv) {
    for (std::size_t b = 0; b < u.bins(); ++b) {
      const double n = frobenius_norm(u.h_bins[b]);
      if (n > u.M_h * (1.0 + kValidationTol)) {
        rep.pass = false;
        rep.offender = "bin " + std::to_string(b) + " has Frobenius norm " + std::to_string(n) +
                       " above M_h";
      }
      times.push_back(u.T * (static_cast<double>(b) + 0.5) / static_cast<double>(u.bins()));
    }
  } else {
    for (int k = 0; k <= 8; ++k) times.push_back(u.T * k / 8.0);
  }
  for (double t : times) {
    const std::vector<double> tg{t};
    const auto out = evaluate_control(u, FlowView(tg, dirac, 0));
    const double n = frobenius_norm(out);
    ++rep.samples;
    if (n > rep.worst_ratio) {
      rep.worst_ratio = n;
      if (n > rep.threshold) rep.offender = "t=" + std::to_string(t);
    }
  }
  rep.pass = rep.pass && rep.worst_ratio <= rep.threshold;
  return rep;
}

ValidationReport validate_control_lipschitz(
    const ControlSpec& u, std::span<const std::pair<MeasureFlow, MeasureFlow>> flows, double p,
    GapMetric metric) {
  ValidationReport rep;
  rep.check = "control_lipschitz";
  if (u.m == 0) return rep;
  const double budget = u.L_u() / static_cast<double>(u.dim());
  rep.threshold = budget * (1.0 + kValidationTol);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& [a, b] = flows[f];
    if (a.grid() != b.grid()) throw Error("control lipschitz: flows must share a grid");
    double gap = 0.0;
    for (std::size_t k = 0; k < a.nodes(); ++k) {
      gap = std::max(gap, ensemble_distance(a.at(k), b.at(k), p, metric));
      const auto ua = evaluate_control(u, a.view(k));
      const auto ub = evaluate_control(u, b.view(k));
      for (std::size_t j = 0; j < ua.size(); ++j) {
        const double diff = std::abs(ua[j] - ub[j]);
        ++rep.samples;
        if (gap == 0.0) {
          if (diff != 0.0) {
            rep.worst_ratio = std::numeric_limits<double>::infinity();
            rep.offender = "pair " + std::to_string(f) + " node " + std::to_string(k) +
                           ": control differs on identical measures";
          }
          continue;
        }
        const double ratio = diff / gap;
        if (ratio > rep.worst_ratio) {
          rep.worst_ratio = ratio;
          rep.offender = "pair " + std::to_string(f) + " node " + std::to_string(k) +
                         " component " + std::to_string(j);
        }
      }
    }
  }
  rep.pass = rep.worst_ratio <= rep.threshold;
  return rep;
}

}  // namespace mfc
