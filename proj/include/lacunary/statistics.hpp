// statistics.hpp
//
// Counting statistics of a point set on the circle at window length L/N:
// the counting function S_N(x), number variance, pair and k-level
// correlations with the tent kernel, the Fourier-side term T_N, moments of
// S_N and an empirical central limit check.
//
// Conventions:
//   * windows are closed: a point at circle distance exactly (L/N)/2 from x is counted;
//   * correlations use strict support: the tent vanishes at |t| = 1;
//   * sums run left to right in a fixed order, so each result is reproducible.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/bigfloat.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/kernels.hpp"
#include "lacunary/rng.hpp"
#include "lacunary/sequence.hpp"

namespace lacunary {

/// N points, intensity L, window length L/N. Requires 0 < L < N.
class WindowParams {
 public:
  WindowParams(std::size_t n_points, double l_value) : n_(n_points), l_(l_value) {
    if (n_points == 0) throw OutOfRange("window needs N >= 1");
    if (!(l_value > 0.0) || !std::isfinite(l_value)) {
      throw DegenerateWindow("L must be positive, got " + std::to_string(l_value));
    }
    if (!(l_value < static_cast<double>(n_points))) {
      throw WindowTooWide("L/N = " + std::to_string(l_value / n_points) + " must be < 1");
    }
  }

  std::size_t n_points() const noexcept { return n_; }
  double l_value() const noexcept { return l_; }
  double window_len() const noexcept { return l_ / static_cast<double>(n_); }

 private:
  std::size_t n_;
  double l_;
};

enum class Method { exact, fourier, monte_carlo };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::fourier: return "fourier";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "?";
}

struct StatResult {
  double value = 0.0;
  double truncation_bound = 0.0;
  double mc_std_error = 0.0;
  Method method = Method::exact;
};

struct EmpiricalCltResult {
  std::size_t grid_size = 0;
  double ks_distance = 0.0;
  std::vector<std::pair<double, double>> histogram;  // ((S - L)/sqrt(L), mass)
  double mean = 0.0;
  double scale = 0.0;
};

/// rho(alpha) = exp(1 - 1/(1 - u^2)) for u = (alpha - center)/radius, |u| < 1.
struct WeightSpec {
  enum class Kind { bump };
  double center = 1.5;
  double radius = 0.5;
  Kind kind = Kind::bump;

  double operator()(double alpha) const {
    const double u = (alpha - center) / radius;
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  }
};

namespace detail {

inline void require_matching(const FracPointSet& points, const WindowParams& w) {
  if (points.n_points() != w.n_points()) {
    throw OutOfRange("window built for N = " + std::to_string(w.n_points()) + " but point set has " +
                     std::to_string(points.n_points()));
  }
}

inline std::size_t count_closed(std::span<const double> v, double lo, double hi) {
  const auto first = std::lower_bound(v.begin(), v.end(), lo);
  const auto last = std::upper_bound(first, v.end(), hi);
  return static_cast<std::size_t>(last - first);
}

class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline constexpr double kCorrelationWorkLimit = 1e9;

/// Sum over point sets {i_1..i_k} of (1 - spread/w)_+ where spread is the
/// shortest arc holding them, valid for w <= 1/2 (each set lies in at most one
/// arc shorter than w). Every set is charged to its first point i in cyclic
/// sorted order; with the window points after i at distances d_1 <= d_2 <= ...,
/// choosing d_p as the farthest member leaves C(p-1, k-2) choices for the rest.
inline double anchored_tuple_sum(std::span<const double> v, double w, int k) {
  const std::size_t n = v.size();
  const int r = k - 2;
  std::vector<double> binom;  // binom[q] = C(q, r)
  auto choose = [&](std::size_t q) {
    while (binom.size() <= q) {
      const std::size_t m = binom.size();
      if (m < static_cast<std::size_t>(r)) binom.push_back(0.0);
      else if (m == static_cast<std::size_t>(r)) binom.push_back(1.0);
      else binom.push_back(binom.back() * static_cast<double>(m) / static_cast<double>(m - r));
    }
    return binom[q];
  };

  double work = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double anchor_sum = 0.0;
    std::size_t s = 1;
    for (; s < n; ++s) {
      const std::size_t j = i + s;
      const double d = j < n ? v[j] - v[i] : v[j - n] + 1.0 - v[i];
      if (d >= w) break;
      anchor_sum += choose(s - 1) * (1.0 - d / w);
    }
    total += anchor_sum;
    work += static_cast<double>(s);
    if (work > kCorrelationWorkLimit) {
      throw CostGuard("correlation work exceeds " + std::to_string(kCorrelationWorkLimit) + " steps");
    }
  }
  return total;
}

/// Pair sum with every integer shift, for 1/2 < w < 1.
inline double all_shift_pair_sum(std::span<const double> v, double w) {
  const std::size_t n = v.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = v[j] - v[i];
      total += tent((d - 1.0) / w) + tent(d / w) + tent((d + 1.0) / w);
    }
  }
  return total;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

/// S_N(x): points within circle distance (L/N)/2 of x, endpoints included.
inline std::size_t counting_function(const FracPointSet& points, const WindowParams& w, double x) {
  detail::require_matching(points, w);
  if (!(x >= 0.0 && x < 1.0)) throw OutOfRange("x must lie in [0,1)");
  const auto v = points.values();
  const double h = w.window_len() / 2.0;  // < 1/2, so no point is counted twice
  const double lo = x - h;
  const double hi = x + h;
  if (lo < 0.0) return detail::count_closed(v, 0.0, hi) + detail::count_closed(v, lo + 1.0, 1.0);
  if (hi >= 1.0) return detail::count_closed(v, lo, 1.0) + detail::count_closed(v, 0.0, hi - 1.0);
  return detail::count_closed(v, lo, hi);
}

/// Integral of S_N over [0,1): N windows of length L/N each.
inline double mean_count(const FracPointSet& points, const WindowParams& w) {
  detail::require_matching(points, w);
  return static_cast<double>(w.n_points()) * w.window_len();
}

/// R^2_N = (1/N) sum_{i != j} sum_n tent((theta_i - theta_j + n)/(L/N)).
inline StatResult pair_correlation(const FracPointSet& points, const WindowParams& w) {
  detail::require_matching(points, w);
  const double width = w.window_len();
  const double n = static_cast<double>(w.n_points());
  if (width <= 0.5) {
    return {2.0 * detail::anchored_tuple_sum(points.values(), width, 2) / n, 0.0, 0.0, Method::exact};
  }
  return {detail::all_shift_pair_sum(points.values(), width) / n, 0.0, 0.0, Method::exact};
}

/// Sigma^2_N = L - L^2 + L R^2_N.
inline StatResult number_variance_exact(const FracPointSet& points, const WindowParams& w) {
  const double l = w.l_value();
  const StatResult r2 = pair_correlation(points, w);
  return {l - l * l + l * r2.value, 0.0, 0.0, Method::exact};
}

/// Monte Carlo estimate of the integral of (S_N(x) - L)^2 over uniform x.
inline StatResult number_variance_mc(const FracPointSet& points, const WindowParams& w,
                                     std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw OutOfRange("number_variance_mc needs at least 1000 samples");
  detail::require_matching(points, w);
  Pcg64 gen(RngSpec{seed, 0});
  const double l = w.l_value();
  // Welford running mean / variance of (S - L)^2.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double dev = static_cast<double>(counting_function(points, w, gen.uniform01())) - l;
    const double y = dev * dev;
    const double delta = y - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (y - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(samples - 1));
  return {mean, 0.0, sd / std::sqrt(static_cast<double>(samples)), Method::monte_carlo};
}

inline constexpr std::size_t kMaxCorrelationPoints = std::size_t{1} << 14;

/// R^k_N over ordered distinct k-tuples with the k-dimensional tent, 2 <= k <= 5.
/// k = 2 is pair_correlation itself; k >= 3 requires L/N <= 1/2.
inline StatResult k_level_correlation(const FracPointSet& points, const WindowParams& w, int k) {
  if (k < 2 || k > 5) throw OutOfRange("k-level correlation supports 2 <= k <= 5");
  if (k == 2) return pair_correlation(points, w);
  detail::require_matching(points, w);
  if (w.n_points() > kMaxCorrelationPoints) {
    throw CostGuard("k-level correlation limited to N <= 2^14");
  }
  const double width = w.window_len();
  if (width > 0.5) throw WindowTooWide("k-level correlation with k >= 3 needs L/N <= 1/2");
  const double n = static_cast<double>(w.n_points());
  const double sum = detail::anchored_tuple_sum(points.values(), width, k);
  return {detail::factorial(k) * sum / n, 0.0, 0.0, Method::exact};
}

/// E_x[S_N^k] = L + L sum_{j=2}^k S(k, j) R^j_N; k = 1 gives L.
inline StatResult count_moment(const FracPointSet& points, const WindowParams& w, int k) {
  if (k < 1 || k > 5) throw OutOfRange("count_moment supports 1 <= k <= 5");
  detail::require_matching(points, w);
  const double l = w.l_value();
  double acc = 0.0;
  for (int j = 2; j <= k; ++j) {
    acc += static_cast<double>(stirling2(k, j)) * k_level_correlation(points, w, j).value;
  }
  return {l + l * acc, 0.0, 0.0, Method::exact};
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Distribution of (S_N(x) - L)/sqrt(L) over the grid x_i = (i + 1/2)/grid,
/// compared with N(0,1) in Kolmogorov-Smirnov distance.
inline EmpiricalCltResult empirical_clt(const FracPointSet& points, const WindowParams& w,
                                       std::size_t grid) {
  if (grid < 1000) throw OutOfRange("empirical_clt needs grid >= 1000");
  const double l = w.l_value();
  if (!(l > 0.0)) throw DegenerateScale("L must be positive");
  const double scale = std::sqrt(l);
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    ++counts[counting_function(points, w, x)];
  }
  EmpiricalCltResult out;
  out.grid_size = grid;
  out.mean = l;
  out.scale = scale;
  std::size_t below = 0;
  for (const auto& [s, c] : counts) {
    const double z = (static_cast<double>(s) - l) / scale;
    const double phi = normal_cdf(z);
    const double f_before = static_cast<double>(below) / static_cast<double>(grid);
    below += c;
    const double f_after = static_cast<double>(below) / static_cast<double>(grid);
    out.ks_distance = std::max({out.ks_distance, std::abs(f_before - phi), std::abs(f_after - phi)});
    out.histogram.emplace_back(z, static_cast<double>(c) / static_cast<double>(grid));
  }
  return out;
}

/// Partial sum of the Fejer series: sum_{|n| <= M} tent_hat(n L/N).
inline double fourier_sum_check(const WindowParams& w, std::size_t m_max) {
  if (w.l_value() < 1.0) throw OutOfRange("fourier_sum_check needs L >= 1");
  const double scale = w.window_len();
  detail::KahanSum acc;
  for (std::size_t m = m_max; m >= 1; --m) acc.add(tent_hat(static_cast<double>(m) * scale));
  return 1.0 + 2.0 * acc.value();
}

/// Tail bound for fourier_sum_check: 2 N^2 / (pi^2 L^2 M).
inline double fourier_sum_tail_bound(const WindowParams& w, std::size_t m_max) {
  const double ratio = static_cast<double>(w.n_points()) / w.l_value();
  return 2.0 * ratio * ratio / (std::numbers::pi * std::numbers::pi * static_cast<double>(m_max));
}

/// Removes the leading 1/M tail term: 2 S(2M) - S(M).
inline double fourier_sum_extrapolated(const WindowParams& w, std::size_t m_max) {
  return 2.0 * fourier_sum_check(w, 2 * m_max) - fourier_sum_check(w, m_max);
}

namespace detail {

inline void phase_to_unit(Phase p, double& c, double& s) {
  // Signed top word: turns in [-1/2, 1/2).
  const double turns = std::ldexp(static_cast<double>(static_cast<std::int64_t>(phase_hi(p))), -64);
  const double angle = 2.0 * std::numbers::pi * turns;
  c = std::cos(angle);
  s = std::sin(angle);
}

/// sum_{m=1}^{M} tent_hat(m * scale) * (|W(m)|^2 - N), W(m) = sum_j e(m theta_j).
/// e(m theta_j) is advanced by complex rotation and re-anchored from the exact
/// integer phase m * theta_j mod 1 every kResync steps.
inline double fejer_weighted_power_sum(std::span<const Phase> phases, double scale,
                                       std::size_t m_max) {
  constexpr std::size_t kResync = 128;
  const std::size_t n = phases.size();
  std::vector<double> re(n), im(n), step_re(n), step_im(n);
  for (std::size_t j = 0; j < n; ++j) phase_to_unit(phases[j], step_re[j], step_im[j]);
  const double count = static_cast<double>(n);

  KahanSum acc;
  for (std::size_t base = 1; base <= m_max; base += kResync) {
    for (std::size_t j = 0; j < n; ++j) {
      phase_to_unit(static_cast<Phase>(base) * phases[j], re[j], im[j]);
    }
    const std::size_t stop = std::min(m_max, base + kResync - 1);
    for (std::size_t m = base; m <= stop; ++m) {
      double wr0 = 0.0, wr1 = 0.0, wr2 = 0.0, wr3 = 0.0;
      double wi0 = 0.0, wi1 = 0.0, wi2 = 0.0, wi3 = 0.0;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        wr0 += re[j];
        wr1 += re[j + 1];
        wr2 += re[j + 2];
        wr3 += re[j + 3];
        wi0 += im[j];
        wi1 += im[j + 1];
        wi2 += im[j + 2];
        wi3 += im[j + 3];
      }
      for (; j < n; ++j) {
        wr0 += re[j];
        wi0 += im[j];
      }
      const double wr = (wr0 + wr1) + (wr2 + wr3);
      const double wi = (wi0 + wi1) + (wi2 + wi3);
      acc.add(tent_hat(static_cast<double>(m) * scale) * (wr * wr + wi * wi - count));
      if (m == stop) break;
      for (std::size_t q = 0; q < n; ++q) {
        const double r = re[q] * step_re[q] - im[q] * step_im[q];
        im[q] = re[q] * step_im[q] + im[q] * step_re[q];
        re[q] = r;
      }
    }
  }
  return acc.value();
}

inline constexpr double kMaxFourierTerms = 1e8;

/// Smallest M with 2 (N^2 - N) / (pi^2 L M) <= tol.
inline std::size_t fourier_cutoff(const WindowParams& w, double tol) {
  if (!(tol > 0.0)) throw OutOfRange("tol must be positive");
  const double n = static_cast<double>(w.n_points());
  const double m = 2.0 * (n * n - n) / (std::numbers::pi * std::numbers::pi * w.l_value() * tol);
  if (m > kMaxFourierTerms) {
    throw TolUnreachable("tol " + std::to_string(tol) + " needs M = " + std::to_string(m) +
                         " > 1e8 Fourier terms");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m)));
}

}  // namespace detail

/// T_N from fractional-part phases: (L/N^2) sum_{n != 0} tent_hat(nL/N) (|W(n)|^2 - N),
/// truncated at |n| <= M. Since ||W|^2 - N| <= N^2 - N and
/// sum_{|n|>M} tent_hat(nL/N) <= 2 N^2/(pi^2 L^2 M), the omitted tail is at most
/// 2 (N^2 - N)/(pi^2 L M) <= tol; that value is the truncation_bound.
/// Phases must be accurate to 2^-64 / M so that n * theta stays accurate.
inline StatResult t_n_fourier_from_phases(std::span<const Phase> phases, const WindowParams& w,
                                          double tol) {
  if (phases.size() != w.n_points()) throw OutOfRange("phase count does not match N");
  if (w.l_value() < 1.0) throw OutOfRange("t_n_fourier needs L >= 1");
  const std::size_t m_max = detail::fourier_cutoff(w, tol);
  const double n = static_cast<double>(w.n_points());
  const double l = w.l_value();
  const double sum = detail::fejer_weighted_power_sum(phases, w.window_len(), m_max);
  const double bound =
      2.0 * (n * n - n) / (std::numbers::pi * std::numbers::pi * l * static_cast<double>(m_max));
  return {2.0 * l / (n * n) * sum, bound, 0.0, Method::fourier};
}

/// T_N for the sequence {alpha a_j}, phases computed with log2(M) extra bits.
inline StatResult t_n_fourier(const SequenceSpec& spec, const AlphaSpec& alpha,
                              const WindowParams& w, double tol) {
  if (w.l_value() < 1.0) throw OutOfRange("t_n_fourier needs L >= 1");
  const std::size_t m_max = detail::fourier_cutoff(w, tol);
  const long extra = static_cast<long>(std::ceil(std::log2(static_cast<double>(m_max)))) + 1;
  const auto phases = frac_phases_unsorted(spec, alpha, w.n_points(), extra);
  return t_n_fourier_from_phases(phases, w, tol);
}

/// Value of one quadrature node: the integrand and an absolute bound on its error.
struct NodeValue {
  double value = 0.0;
  double bound = 0.0;
};

/// Stratified quadrature of integral f(alpha) rho(alpha) over the support of rho.
/// Node i is drawn uniformly (to full precision) from the i-th of quad_points
/// equal strata, since T_N oscillates on scales far below any fixed node spacing.
/// mc_std_error = sample-sd(g)/sqrt(Q) with g_i = 2 r rho(alpha_i) f(alpha_i), which
/// over-covers the stratified error.
inline StatResult weighted_quadrature(const WeightSpec& weight, std::size_t quad_points,
                                      std::uint64_t seed,
                                      const std::function<NodeValue(const AlphaSpec&)>& f) {
  if (quad_points < 100) throw OutOfRange("quadrature needs at least 100 points");
  if (!(weight.radius > 0.0)) throw OutOfRange("weight radius must be positive");
  const double lo = weight.center - weight.radius;
  const double width = 2.0 * weight.radius;
  const double h = width / static_cast<double>(quad_points);
  const double q = static_cast<double>(quad_points);
  double mean = 0.0;
  double m2 = 0.0;
  double bound = 0.0;
  for (std::size_t i = 0; i < quad_points; ++i) {
    const double a = lo + h * static_cast<double>(i);
    const AlphaSpec alpha = AlphaSpec::uniform(hex_literal(a), hex_literal(a + h), RngSpec{seed, i});
    const double rho = weight(alpha.approx());
    double g = 0.0;
    if (rho > 0.0) {
      const NodeValue node = f(alpha);
      g = width * rho * node.value;
      bound += width * rho * node.bound / q;
    }
    const double delta = g - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (g - mean);
  }
  const double sd = std::sqrt(m2 / (q - 1.0));
  return {mean, bound, sd / std::sqrt(q), Method::fourier};
}

/// V_N(L) = integral |T_N(L, alpha)|^2 rho(alpha) d alpha, each T_N via t_n_fourier.
inline StatResult vn_estimate(const SequenceSpec& spec, const WindowParams& w,
                              const WeightSpec& weight, std::size_t quad_points, double tol,
                              std::uint64_t seed = 0) {
  return weighted_quadrature(weight, quad_points, seed, [&](const AlphaSpec& alpha) {
    const StatResult t = t_n_fourier(spec, alpha, w, tol);
    const double b = t.truncation_bound;
    return NodeValue{t.value * t.value, 2.0 * std::abs(t.value) * b + b * b};
  });
}

}  // namespace lacunary
