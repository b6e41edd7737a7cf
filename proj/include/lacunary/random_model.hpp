// random_model.hpp
//
// N i.i.d. uniform points on [0,1): the Poissonian reference model.
#pragma once

#include <cstddef>
#include <vector>

#include "lacunary/errors.hpp"
#include "lacunary/rng.hpp"
#include "lacunary/sequence.hpp"

namespace lacunary {

/// Sorted i.i.d. uniform points drawn from Pcg64(rng); bit-exact per (seed, stream).
inline FracPointSet iid_points(std::size_t n, RngSpec rng) {
  if (n == 0) throw OutOfRange("iid_points needs n >= 1");
  Pcg64 gen(rng);
  std::vector<double> values(n);
  for (double& v : values) v = gen.uniform01();
  return FracPointSet::from_values(values, "n/a");
}

/// Variance of Binomial(N, L/N): L (1 - L/N).
inline double binomial_variance_reference(std::size_t n, double l) {
  if (n == 0 || l < 0.0 || l > static_cast<double>(n)) {
    throw OutOfRange("binomial_variance_reference needs 0 <= L <= N");
  }
  return l * (1.0 - l / static_cast<double>(n));
}

}  // namespace lacunary
