// kernels.hpp
//
// Closed-form kernels: the tent function, its Fourier transform (Fejer
// kernel), the k-dimensional tent obtained by overlapping k unit windows, and
// the moment machinery linking correlations to Poisson and Gaussian moments.
#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lacunary/errors.hpp"

namespace lacunary {

inline constexpr std::size_t kMaxDeltaDimension = 8;
inline constexpr int kMaxStirlingOrder = 30;

/// max{1 - |t|, 0}
inline double tent(double t) { return std::max(1.0 - std::abs(t), 0.0); }

/// sin^2(pi x) / (pi x)^2, the Fourier transform of the tent.
inline double tent_hat(double x) {
  const double y = std::numbers::pi * x;
  if (std::abs(x) < 1e-4) {
    // (sin y / y)^2 = 1 - y^2/3 + 2 y^4/45 - ...
    const double y2 = y * y;
    return 1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0;
  }
  // Reduce the argument first so large x keeps full accuracy in the numerator.
  const double s = std::sin(std::numbers::pi * (x - std::nearbyint(x)));
  return (s * s) / (y * y);
}

/// Overlap volume of k unit windows with offsets (0, t_1, ..., t_{k-1}):
/// max{1 - (max{0,t} - min{0,t}), 0}. For k = 2 this is tent(t_1).
inline double delta_k(std::span<const double> ts) {
  if (ts.empty()) throw OutOfRange("delta_k needs k - 1 >= 1 offsets");
  if (ts.size() > kMaxDeltaDimension) {
    throw DimensionTooLarge("k - 1 = " + std::to_string(ts.size()) + " exceeds " +
                            std::to_string(kMaxDeltaDimension));
  }
  double hi = 0.0;
  double lo = 0.0;
  for (double t : ts) {
    hi = std::max(hi, t);
    lo = std::min(lo, t);
  }
  return std::max(1.0 - (hi - lo), 0.0);
}

using StirlingInt = unsigned __int128;

/// Stirling numbers of the second kind, exact. S(30, j) < 2^80, so 128 bits suffice.
inline StirlingInt stirling2(int k, int j) {
  if (k < 0 || j < 0 || j > k || k > kMaxStirlingOrder) {
    throw OutOfRange("stirling2 needs 0 <= j <= k <= 30, got (" + std::to_string(k) + ", " +
                     std::to_string(j) + ")");
  }
  static const auto table = [] {
    std::vector<std::vector<StirlingInt>> t(kMaxStirlingOrder + 1);
    for (int n = 0; n <= kMaxStirlingOrder; ++n) {
      t[n].assign(n + 1, 0);
      t[n][0] = n == 0 ? 1 : 0;
      for (int m = 1; m <= n; ++m) {
        const StirlingInt same = m <= n - 1 ? t[n - 1][m] : 0;
        t[n][m] = static_cast<StirlingInt>(m) * same + t[n - 1][m - 1];
      }
    }
    return t;
  }();
  return table[k][j];
}

/// k-th moment of Poisson(L): sum_j S(k, j) L^j.
inline double poisson_moment(int k, double l) {
  if (k < 0 || k > kMaxStirlingOrder) throw OutOfRange("poisson_moment needs 0 <= k <= 30");
  if (l < 0.0) throw OutOfRange("poisson_moment needs L >= 0");
  // Horner in L; S(k, 0) = 0 for k >= 1.
  double acc = 0.0;
  for (int j = k; j >= 0; --j) acc = acc * l + static_cast<double>(stirling2(k, j));
  return acc;
}

/// k-th moment of N(0, 1): 0 for odd k, (k-1)!! for even k.
inline double normal_moment(int k) {
  if (k < 0) throw OutOfRange("normal_moment needs k >= 0");
  if (k % 2 == 1) return 0.0;
  double acc = 1.0;
  for (int m = k - 1; m > 1; m -= 2) acc *= m;
  return acc;
}

/// C_k(N) = (1 - 1/N)(1 - 2/N)...(1 - (k-1)/N); C_1 = 1.
inline double ck_factor(int k, std::size_t n) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw OutOfRange("ck_factor needs 1 <= k <= N, got k = " + std::to_string(k));
  }
  const double nn = static_cast<double>(n);
  double acc = 1.0;
  for (int i = 1; i < k; ++i) acc *= 1.0 - i / nn;
  return acc;
}

/// MGF of (Y - L)/sqrt(L) for Y ~ Poisson(L): exp(-t sqrt(L) + L (e^{t/sqrt(L)} - 1)).
inline double normalized_poisson_mgf(double t, double l) {
  if (!(l > 0.0)) throw OutOfRange("normalized_poisson_mgf needs L > 0");
  const double root = std::sqrt(l);
  const double u = t / root;
  if (u > std::log(DBL_MAX)) throw Overflow("e^{t/sqrt(L)} is not representable");
  // L (e^u - 1) - t sqrt(L) = L (e^u - 1 - u); series avoids cancellation for small u.
  double excess;
  if (std::abs(u) < 1e-2) {
    double term = u * u / 2.0;
    excess = 0.0;
    for (int m = 3; m < 12; ++m) {
      excess += term;
      term *= u / m;
    }
  } else {
    excess = std::expm1(u) - u;
  }
  const double exponent = l * excess;
  if (exponent > std::log(DBL_MAX)) {
    throw Overflow("exponent " + std::to_string(exponent) + " exceeds double range");
  }
  return std::exp(exponent);
}

/// Poisson and Gaussian moments up to max_order for a fixed L.
struct MomentTable {
  int max_order = 0;
  double l_value = 0.0;
  std::vector<double> poisson;  // poisson[k-1] = mu_k^Poisson(L)
  std::vector<double> normal;   // normal[k-1] = mu_k^normal
};

inline MomentTable moment_table(int max_order, double l) {
  if (max_order < 1 || max_order > kMaxStirlingOrder) throw OutOfRange("max_order must be in [1, 30]");
  MomentTable t;
  t.max_order = max_order;
  t.l_value = l;
  for (int k = 1; k <= max_order; ++k) {
    t.poisson.push_back(poisson_moment(k, l));
    t.normal.push_back(normal_moment(k));
  }
  return t;
}

}  // namespace lacunary
