#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "mfc/drift.hpp"
#include "mfc/error.hpp"

namespace mfc {

DriftField::DriftField(std::string name, std::size_t dim, Eval eval, DriftConstants constants,
                       bool measure_dependent)
    : name_(std::move(name)),
      dim_(dim),
      eval_(std::move(eval)),
      constants_(constants),
      measure_dependent_(measure_dependent) {
  if (dim_ == 0) throw Error("drift '" + name_ + "': dimension must be >= 1");
  if (!eval_) throw Error("drift '" + name_ + "': missing evaluation function");
  const auto& c = constants_;
  if (!(c.beta >= 0.0 && c.beta < 1.0))
    throw Error("drift '" + name_ + "': beta must lie in [0, 1)");
  if (!(c.alpha > c.beta && c.alpha <= 1.0))
    throw Error("drift '" + name_ + "': alpha must lie in (beta, 1]");
  if (!(c.K >= 0.0)) throw Error("drift '" + name_ + "': K must be >= 0");
  if (!(c.D >= 0.0)) throw Error("drift '" + name_ + "': D must be >= 0");
  if (!(c.p >= 1.0)) throw Error("drift '" + name_ + "': p must be >= 1");
}

std::vector<double> DriftField::operator()(const FlowView& flow, const PhasePoint& z) const {
  if (z.dim() != dim_) throw Error("drift '" + name_ + "': dimension mismatch");
  std::vector<double> out(dim_, 0.0);
  eval_(flow, z.x, z.v, out);
  return out;
}

namespace fields {

DriftField zero(std::size_t dim) {
  return DriftField(
      "zero", dim,
      [](const FlowView&, auto, auto, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
      },
      DriftConstants{.K = 1.0, .beta = 0.0, .alpha = 1.0, .D = 0.0}, false);
}

DriftField kernel_drift(const InteractionKernel& kernel, std::size_t dim, double p) {
  DriftConstants c;
  // Unbounded kernels get their Lipschitz constant as nominal growth constant;
  // the growth validator rejects them on large samples.
  c.K = kernel.bounded() ? std::max(kernel.bound, 1e-300) : kernel.lipschitz;
  c.beta = 0.0;
  c.alpha = 1.0;
  c.D = 2.0 * kernel.lipschitz;
  c.p = p;
  return DriftField(
      "kernel:" + kernel.name, dim,
      [kernel](const FlowView& flow, std::span<const double> x, std::span<const double> v,
               std::span<double> out) {
        kernel_convolution_into(kernel, flow.current(), x, v, out);
      },
      c, !kernel.is_zero);
}

DriftField linear_damping(std::size_t dim, double gamma) {
  return DriftField(
      "linear_damping", dim,
      [gamma](const FlowView&, auto, std::span<const double> v, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = -gamma * v[j];
      },
      DriftConstants{.K = std::abs(gamma), .beta = 0.0, .alpha = 1.0, .D = std::abs(gamma)},
      false);
}

DriftField constant(std::vector<double> value) {
  double norm = 0.0;
  for (double c : value) norm += c * c;
  const std::size_t dim = value.size();
  return DriftField(
      "constant", dim,
      [value](const FlowView&, auto, auto, std::span<double> out) {
        std::copy(value.begin(), value.end(), out.begin());
      },
      DriftConstants{.K = std::max(std::sqrt(norm), 1e-300), .beta = 0.0, .alpha = 1.0, .D = 0.0},
      false);
}

DriftField perturbed(const DriftField& base, double eps, double eps_budget) {
  const double budget = std::max(std::abs(eps), std::abs(eps_budget));
  DriftConstants c = base.constants();
  c.K += budget * std::sqrt(static_cast<double>(base.dim()));
  c.D += budget;
  return DriftField(
      base.name() + "+perturbation", base.dim(),
      [base, eps](const FlowView& flow, std::span<const double> x, std::span<const double> v,
                  std::span<double> out) {
        base.eval(flow, x, v, out);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += eps * std::tanh(x[j]);
      },
      c, base.measure_dependent());
}

}  // namespace fields

namespace {

// (1/N) sum K(xi_i - y) for a position-only kernel.
void position_convolution(const InteractionKernel& kernel, const ParticleEnsemble& ens,
                          std::span<const double> y, std::span<double> out) {
  const std::size_t d = ens.dim();
  std::fill(out.begin(), out.end(), 0.0);
  if (kernel.is_zero) return;
  std::vector<double> buf(2 * d);
  std::span<double> dx(buf.data(), d), term(buf.data() + d, d);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto xi = ens.x(i);
    for (std::size_t j = 0; j < d; ++j) dx[j] = xi[j] - y[j];
    kernel.eval(dx, {}, term);
    for (std::size_t j = 0; j < d; ++j) out[j] += term[j];
  }
  const double inv = 1.0 / static_cast<double>(ens.size());
  for (auto& e : out) e *= inv;
}

}  // namespace

LeaderCouplingField leader_coupling_from_kernel(const InteractionKernel& k12) {
  LeaderCouplingField w;
  w.name = "kernel:" + k12.name;
  w.eval = [k12](std::span<const LeaderState> history, std::span<const double> x,
                 std::span<const double> v, std::span<double> out) {
    if (history.empty()) throw Error("leader coupling: empty leader history");
    leader_coupling_into(k12, history.back(), x, v, out);
  };
  w.K_w = k12.bound;
  w.L_w = k12.lipschitz;
  w.is_zero = k12.is_zero;
  return w;
}

LeaderCouplingField zero_leader_coupling() { return leader_coupling_from_kernel(kernels::zero()); }

LeaderField leader_field_from_kernels(const InteractionKernel& k21,
                                      const InteractionKernel& k22) {
  if (k21.uses_velocity || k22.uses_velocity)
    throw Error("leader field kernels must be position-only");
  LeaderField f;
  f.name = "kernels:" + k21.name + "," + k22.name;
  f.eval = [k21, k22](const FlowView& flow, std::span<const LeaderState> history,
                      std::span<double> out) {
    const LeaderState& now = history.back();
    const std::size_t m = now.m, d = now.d;
    std::fill(out.begin(), out.end(), 0.0);
    if (m == 0) return;
    std::vector<double> buf(3 * d);
    std::span<double> conv(buf.data(), d), dy(buf.data() + d, d), term(buf.data() + 2 * d, d);
    for (std::size_t j = 0; j < m; ++j) {
      const auto yj = now.pos(j);
      std::span<double> oj = out.subspan(j * d, d);
      position_convolution(k21, flow.current(), yj, conv);
      for (std::size_t c = 0; c < d; ++c) oj[c] = conv[c];
      if (k22.is_zero) continue;
      std::fill(conv.begin(), conv.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const auto yi = now.pos(i);
        for (std::size_t c = 0; c < d; ++c) dy[c] = yi[c] - yj[c];
        k22.eval(dy, {}, term);
        for (std::size_t c = 0; c < d; ++c) conv[c] += term[c];
      }
      for (std::size_t c = 0; c < d; ++c) oj[c] += conv[c] / static_cast<double>(m);
    }
  };
  f.K_F = k21.bound + k22.bound;
  f.L_F = k21.lipschitz + k22.lipschitz;
  return f;
}

LeaderField zero_leader_field() {
  return leader_field_from_kernels(kernels::zero(), kernels::zero());
}

double truncation_weight(double r, double cap) {
  const double s = std::clamp(r - cap, 0.0, 1.0);
  return std::clamp(1.0 - 3.0 * s * s + 2.0 * s * s * s, 0.0, 1.0);
}

DriftField clamp_drift(const DriftField& field, double cap) {
  if (!(cap > 0.0)) throw Error("clamp_drift: cap must be > 0");
  struct Cache {
    std::mutex mutex;
    std::uint64_t id = 0;
    std::size_t node = 0;
    double weight = 1.0;
  };
  auto cache = std::make_shared<Cache>();
  const double p = field.constants().p;
  auto weight_of = [cache, cap, p](const FlowView& flow) {
    if (flow.flow_id() != 0) {
      std::lock_guard lock(cache->mutex);
      if (cache->id == flow.flow_id() && cache->node == flow.index()) return cache->weight;
    }
    const double w = truncation_weight(flow.sup_moment(p), cap);
    if (flow.flow_id() != 0) {
      std::lock_guard lock(cache->mutex);
      cache->id = flow.flow_id();
      cache->node = flow.index();
      cache->weight = w;
    }
    return w;
  };
  return DriftField(
      field.name() + "|clamped", field.dim(),
      [field, weight_of](const FlowView& flow, std::span<const double> x,
                         std::span<const double> v, std::span<double> out) {
        field.eval(flow, x, v, out);
        const double w = weight_of(flow);
        for (auto& e : out) e *= w;
      },
      field.constants(), true);
}

}  // namespace mfc
