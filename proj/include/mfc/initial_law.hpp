#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfc/phase_space.hpp"

namespace mfc {

/// Law of the initial follower state on R^{2d}. Vectors of length 2d are
/// ordered (x_0..x_{d-1}, v_0..v_{d-1}).
struct InitialLaw {
  enum class Kind { gaussian, uniform, point, mixture };

  Kind kind = Kind::point;
  std::size_t dim = 1;
  std::vector<double> mean;      ///< gaussian mean
  std::vector<double> variance;  ///< gaussian diagonal covariance
  std::vector<double> lower;     ///< uniform box
  std::vector<double> upper;
  std::vector<double> location;  ///< point mass
  std::vector<InitialLaw> components;
  std::vector<double> weights;

  static InitialLaw gaussian(std::size_t dim, std::vector<double> mean,
                             std::vector<double> variance);
  static InitialLaw standard_gaussian(std::size_t dim, double variance = 1.0);
  static InitialLaw uniform(std::size_t dim, std::vector<double> lower,
                            std::vector<double> upper);
  static InitialLaw point(std::size_t dim, std::vector<double> location);
  static InitialLaw mixture(std::vector<InitialLaw> components, std::vector<double> weights);

  /// Throws Error on inconsistent parameters.
  void validate() const;
};

/// N i.i.d. draws. Particle i depends only on (law, seed, i), so the first n
/// particles of a larger sample equal the sample of size n.
ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t n, std::uint64_t seed);

}  // namespace mfc
