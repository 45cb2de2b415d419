#include <algorithm>
#include <cmath>

#include "mfc/drift.hpp"
#include "mfc/error.hpp"

namespace mfc {

std::vector<double> InteractionKernel::operator()(std::span<const double> dx,
                                                  std::span<const double> dv) const {
  std::vector<double> out(dx.size(), 0.0);
  eval(dx, dv, out);
  return out;
}

namespace kernels {

InteractionKernel zero() {
  InteractionKernel k;
  k.name = "zero";
  k.eval = [](auto, auto, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  k.lipschitz = 0.0;
  k.bound = 0.0;
  k.symmetry = KernelSymmetry::even;
  k.uses_velocity = false;
  k.is_zero = true;
  return k;
}

InteractionKernel constant(std::vector<double> value) {
  double norm = 0.0;
  for (double c : value) norm += c * c;
  InteractionKernel k;
  k.name = "constant";
  k.eval = [value](auto, auto, std::span<double> out) {
    if (out.size() != value.size()) throw Error("constant kernel: dimension mismatch");
    std::copy(value.begin(), value.end(), out.begin());
  };
  k.lipschitz = 0.0;
  k.bound = std::sqrt(norm);
  k.symmetry = KernelSymmetry::even;
  k.uses_velocity = false;
  k.is_zero = norm == 0.0;
  return k;
}

InteractionKernel alignment(double gain) {
  InteractionKernel k;
  k.name = "alignment";
  k.eval = [gain](auto, std::span<const double> dv, std::span<double> out) {
    if (dv.size() != out.size()) throw Error("alignment kernel needs velocity differences");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = gain * dv[j];
  };
  k.lipschitz = std::abs(gain);
  k.symmetry = KernelSymmetry::odd;
  return k;
}

InteractionKernel bounded_alignment(std::size_t dim, double gain) {
  InteractionKernel k;
  k.name = "bounded_alignment";
  k.eval = [gain](auto, std::span<const double> dv, std::span<double> out) {
    if (dv.size() != out.size()) throw Error("alignment kernel needs velocity differences");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = gain * std::tanh(dv[j]);
  };
  k.lipschitz = std::abs(gain);
  k.bound = std::abs(gain) * std::sqrt(static_cast<double>(dim));
  k.symmetry = KernelSymmetry::odd;
  return k;
}

InteractionKernel attraction(double gain) {
  InteractionKernel k;
  k.name = "attraction";
  k.eval = [gain](std::span<const double> dx, auto, std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = gain * dx[j];
  };
  k.lipschitz = std::abs(gain);
  k.symmetry = KernelSymmetry::odd;
  k.uses_velocity = false;
  return k;
}

InteractionKernel bounded_attraction(double gain) {
  InteractionKernel k;
  k.name = "bounded_attraction";
  k.eval = [gain](std::span<const double> dx, auto, std::span<double> out) {
    double r2 = 0.0;
    for (double e : dx) r2 += e * e;
    const double scale = gain / (1.0 + r2);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * dx[j];
  };
  // |dx| / (1 + |dx|^2) peaks at |dx| = 1; the Jacobian norm peaks at dx = 0.
  k.lipschitz = std::abs(gain);
  k.bound = 0.5 * std::abs(gain);
  k.symmetry = KernelSymmetry::odd;
  k.uses_velocity = false;
  return k;
}

InteractionKernel bounded_tanh_attraction(std::size_t dim, double gain) {
  InteractionKernel k;
  k.name = "tanh_attraction";
  k.eval = [gain](std::span<const double> dx, auto, std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = gain * std::tanh(dx[j]);
  };
  k.lipschitz = std::abs(gain);
  k.bound = std::abs(gain) * std::sqrt(static_cast<double>(dim));
  k.symmetry = KernelSymmetry::odd;
  k.uses_velocity = false;
  return k;
}

}  // namespace kernels

std::vector<std::string> kernel_names() {
  return {"zero",       "constant",           "alignment",      "bounded_alignment",
          "attraction", "bounded_attraction", "tanh_attraction"};
}

InteractionKernel make_kernel(const std::string& name, std::span<const double> params,
                              std::size_t dim) {
  auto gain = [&]() {
    if (params.empty()) return 1.0;
    if (params.size() != 1) throw Error("kernel '" + name + "' takes one parameter (gain)");
    return params[0];
  };
  if (name == "zero") return kernels::zero();
  if (name == "constant") {
    if (params.size() != dim)
      throw Error("kernel 'constant' needs d = " + std::to_string(dim) + " values");
    return kernels::constant({params.begin(), params.end()});
  }
  if (name == "alignment") return kernels::alignment(gain());
  if (name == "bounded_alignment") return kernels::bounded_alignment(dim, gain());
  if (name == "attraction") return kernels::attraction(gain());
  if (name == "bounded_attraction") return kernels::bounded_attraction(gain());
  if (name == "tanh_attraction") return kernels::bounded_tanh_attraction(dim, gain());
  throw Error("unknown kernel '" + name + "'");
}

void kernel_convolution_into(const InteractionKernel& kernel, const ParticleEnsemble& ens,
                             std::span<const double> x, std::span<const double> v,
                             std::span<double> out) {
  const std::size_t d = ens.dim();
  if (x.size() != d || v.size() != d || out.size() != d)
    throw Error("kernel convolution: dimension mismatch");
  if (ens.empty()) throw Error("empty measure");
  std::fill(out.begin(), out.end(), 0.0);
  if (kernel.is_zero) return;
  std::vector<double> buf(3 * d);
  std::span<double> dx(buf.data(), d), dv(buf.data() + d, d), term(buf.data() + 2 * d, d);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto xi = ens.x(i);
    const auto vi = ens.v(i);
    for (std::size_t j = 0; j < d; ++j) {
      dx[j] = xi[j] - x[j];
      dv[j] = vi[j] - v[j];
    }
    kernel.eval(dx, dv, term);
    for (std::size_t j = 0; j < d; ++j) out[j] += term[j];
  }
  const double inv = 1.0 / static_cast<double>(ens.size());
  for (auto& e : out) e *= inv;
}

std::vector<double> kernel_convolution_drift(const InteractionKernel& kernel,
                                             const ParticleEnsemble& ens,
                                             const PhasePoint& z) {
  std::vector<double> out(ens.dim());
  kernel_convolution_into(kernel, ens, z.x, z.v, out);
  return out;
}

void leader_coupling_into(const InteractionKernel& kernel, const LeaderState& leaders,
                          std::span<const double> x, std::span<const double> v,
                          std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (leaders.m == 0 || kernel.is_zero) return;
  const std::size_t d = leaders.d;
  if (x.size() != d || v.size() != d || out.size() != d)
    throw Error("leader coupling: dimension mismatch");
  std::vector<double> buf(3 * d);
  std::span<double> dy(buf.data(), d), dw(buf.data() + d, d), term(buf.data() + 2 * d, d);
  for (std::size_t i = 0; i < leaders.m; ++i) {
    const auto yi = leaders.pos(i);
    const auto wi = leaders.vel(i);
    for (std::size_t j = 0; j < d; ++j) {
      dy[j] = yi[j] - x[j];
      dw[j] = wi[j] - v[j];
    }
    kernel.eval(dy, dw, term);
    for (std::size_t j = 0; j < d; ++j) out[j] += term[j];
  }
  const double inv = 1.0 / static_cast<double>(leaders.m);
  for (auto& e : out) e *= inv;
}

std::vector<double> leader_coupling_drift(const InteractionKernel& kernel,
                                          const LeaderState& leaders, const PhasePoint& z) {
  std::vector<double> out(z.dim());
  leader_coupling_into(kernel, leaders, z.x, z.v, out);
  return out;
}

}  // namespace mfc
