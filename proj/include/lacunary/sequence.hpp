// sequence.hpp
//
// Lacunary sequences a_1..a_N and their fractional parts {alpha * a_n}.
//
// Terms grow exponentially, so {alpha * a_n} needs roughly log2(alpha * a_N)
// bits before the first fractional bit is even reached. We fix the MPFR
// working precision up front (required_precision) so that every fractional
// part is accurate to 2^-64, then keep the result as a 128-bit fixed-point
// Phase plus a double copy for the statistics.
#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/bigfloat.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/rng.hpp"

namespace lacunary {

enum class SequenceKind { geometric, geometric_plus_poly, custom_ratios };

inline const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::geometric: return "geometric";
    case SequenceKind::geometric_plus_poly: return "geometric-plus-poly";
    case SequenceKind::custom_ratios: return "custom-ratios";
  }
  return "?";
}

/// Parametric lacunary sequence.
///   geometric:           a_n = a1 * ratio^(n-1)
///   geometric-plus-poly: a_n = a1 * ratio^(n-1) + n^poly_degree
///   custom-ratios:       a_1 = a1, a_{n+1} = a_n * ratios[(n-1) mod ratios.size()]
struct SequenceSpec {
  SequenceKind kind = SequenceKind::geometric;
  double a1 = 2.0;
  double ratio = 2.0;
  unsigned poly_degree = 0;
  std::vector<double> ratios;
  // Constant C of the lacunarity check a_{n+1} >= C a_n. Unset: ratio for
  // geometric, 1 + (ratio - 1)/2 for geometric-plus-poly, min(ratios) for custom.
  std::optional<double> lacunarity;

  static SequenceSpec geometric(double a1, double ratio) {
    SequenceSpec s;
    s.kind = SequenceKind::geometric;
    s.a1 = a1;
    s.ratio = ratio;
    return s;
  }

  static SequenceSpec geometric_plus_poly(double a1, double ratio, unsigned degree) {
    SequenceSpec s = geometric(a1, ratio);
    s.kind = SequenceKind::geometric_plus_poly;
    s.poly_degree = degree;
    return s;
  }

  static SequenceSpec custom(double a1, std::vector<double> ratios) {
    SequenceSpec s;
    s.kind = SequenceKind::custom_ratios;
    s.a1 = a1;
    s.ratios = std::move(ratios);
    return s;
  }

  double lacunarity_constant() const {
    if (lacunarity) return *lacunarity;
    switch (kind) {
      case SequenceKind::geometric: return ratio;
      case SequenceKind::geometric_plus_poly: return 1.0 + (ratio - 1.0) / 2.0;
      case SequenceKind::custom_ratios:
        return ratios.empty() ? 0.0 : *std::min_element(ratios.begin(), ratios.end());
    }
    return 0.0;
  }

  void validate() const {
    if (!(a1 > 0.0) || !std::isfinite(a1)) throw InvalidSpec("a1 must be a positive finite real");
    if (kind == SequenceKind::custom_ratios) {
      if (ratios.empty()) throw InvalidSpec("custom-ratios needs at least one ratio");
      for (double r : ratios) {
        if (!(r > 0.0) || !std::isfinite(r)) throw InvalidSpec("ratios must be positive finite reals");
      }
    } else if (!(ratio > 1.0) || !std::isfinite(ratio)) {
      throw InvalidSpec("ratio C must satisfy C > 1");
    }
    if (lacunarity && !(*lacunarity > 1.0)) throw InvalidSpec("lacunarity constant must exceed 1");
    if (kind == SequenceKind::custom_ratios && !(lacunarity_constant() > 1.0)) {
      throw LacunarityViolation("custom ratios include a value <= 1");
    }
  }

  /// log2(a_n), evaluated in double precision (n is 1-based).
  double log2_term(std::size_t n) const {
    const double base = std::log2(a1);
    switch (kind) {
      case SequenceKind::geometric:
        return base + static_cast<double>(n - 1) * std::log2(ratio);
      case SequenceKind::geometric_plus_poly: {
        const double g = base + static_cast<double>(n - 1) * std::log2(ratio);
        const double p = poly_degree * std::log2(static_cast<double>(n));
        const double hi = std::max(g, p);
        return hi + std::log2(1.0 + std::exp2(std::min(g, p) - hi));
      }
      case SequenceKind::custom_ratios: {
        double acc = base;
        for (std::size_t i = 0; i + 1 < n; ++i) acc += std::log2(ratios[i % ratios.size()]);
        return acc;
      }
    }
    return base;
  }

  /// a_{n+1} / a_n in double precision.
  double term_ratio(std::size_t n) const {
    switch (kind) {
      case SequenceKind::geometric: return ratio;
      case SequenceKind::geometric_plus_poly: {
        // (g_n C + (n+1)^d) / (g_n + n^d) with g_n = a1 C^(n-1), evaluated in log space.
        const double lg = std::log(a1) + static_cast<double>(n - 1) * std::log(ratio);
        const double t_next = std::exp(poly_degree * std::log(static_cast<double>(n + 1)) - lg);
        const double t_here = std::exp(poly_degree * std::log(static_cast<double>(n)) - lg);
        return (ratio + t_next) / (1.0 + t_here);
      }
      case SequenceKind::custom_ratios: return ratios[(n - 1) % ratios.size()];
    }
    return 0.0;
  }

  std::string describe() const {
    std::string out = std::string(to_string(kind)) + "(a1=" + hex_literal(a1);
    if (kind == SequenceKind::custom_ratios) {
      out += ",ratios=";
      for (std::size_t i = 0; i < ratios.size(); ++i) out += (i ? ";" : "") + hex_literal(ratios[i]);
    } else {
      out += ",ratio=" + hex_literal(ratio);
    }
    if (kind == SequenceKind::geometric_plus_poly) out += ",degree=" + std::to_string(poly_degree);
    return out + ")";
  }
};

/// Throws LacunarityViolation unless a_{i+1} >= C a_i for all i < n.
/// Ratios are compared with a relative slack of 1e-12 to absorb double rounding.
inline void check_lacunarity(const SequenceSpec& spec, std::size_t n) {
  spec.validate();
  const double c = spec.lacunarity_constant();
  for (std::size_t i = 1; i < n; ++i) {
    const double r = spec.term_ratio(i);
    if (r < c * (1.0 - 1e-12)) {
      throw LacunarityViolation("a_" + std::to_string(i + 1) + "/a_" + std::to_string(i) + " = " +
                                std::to_string(r) + " < C = " + std::to_string(c));
    }
  }
}

namespace detail {
inline long ceil_log2(double x) { return static_cast<long>(std::ceil(std::log2(x))); }
}  // namespace detail

/// Bits needed so that alpha * a_n mod 1 is accurate to 2^-64 for n <= N:
/// ceil(log2 a_N) + ceil(log2(alpha_bound + 1)) + ceil(log2 N) + 64, plus two
/// guard bits covering the per-term rounding of the recurrence.
inline long required_precision(const SequenceSpec& spec, double alpha_bound, std::size_t n) {
  if (n == 0) throw OutOfRange("sequence length must be >= 1");
  const long term_bits = std::max(0L, static_cast<long>(std::ceil(spec.log2_term(n))));
  const long alpha_bits = detail::ceil_log2(std::abs(alpha_bound) + 1.0);
  const long count_bits = n > 1 ? detail::ceil_log2(static_cast<double>(n)) : 0;
  return term_bits + alpha_bits + count_bits + 64 + 2;
}

/// The multiplier alpha, defined to arbitrary precision.
///
/// exact:   a literal accepted by parse_real ("1/3", "1.25", "0x1.8p0").
/// uniform: lo + (hi - lo) * U where U = 0.w1 w2 w3 ... (base 2^64) and w_k are
///          successive outputs of Pcg64(rng). Any precision sees a prefix of
///          the same real number, so results refine consistently.
class AlphaSpec {
 public:
  static AlphaSpec exact(std::string literal) {
    AlphaSpec a;
    a.kind_ = Kind::exact;
    a.lo_ = std::move(literal);
    a.approx_ = a.evaluate(128).to_double();
    return a;
  }

  static AlphaSpec from_double(double v) { return exact(hex_literal(v)); }

  static AlphaSpec uniform(std::string lo, std::string hi, RngSpec rng) {
    AlphaSpec a;
    a.kind_ = Kind::uniform;
    a.lo_ = std::move(lo);
    a.hi_ = std::move(hi);
    a.rng_ = rng;
    const double l = parse_real(a.lo_, 128).to_double();
    const double h = parse_real(a.hi_, 128).to_double();
    if (!(l < h)) throw InvalidSpec("alpha interval must have lo < hi");
    a.approx_ = a.evaluate(128).to_double();
    return a;
  }

  BigFloat evaluate(long precision_bits) const {
    const long work = precision_bits + 16;
    if (kind_ == Kind::exact) {
      BigFloat v = parse_real(lo_, work);
      BigFloat out(precision_bits);
      mpfr_set(out.get(), v.get(), MPFR_RNDN);
      return out;
    }
    const long words = work / 64 + 2;
    BigFloat u(words * 64);
    Pcg64 gen(rng_);
    for (long k = 0; k < words; ++k) {
      mpfr_mul_2ui(u.get(), u.get(), 64, MPFR_RNDN);
      mpfr_add_ui(u.get(), u.get(), gen.next(), MPFR_RNDN);
    }
    mpfr_div_2ui(u.get(), u.get(), static_cast<unsigned long>(words * 64), MPFR_RNDN);
    BigFloat lo = parse_real(lo_, work);
    BigFloat width = parse_real(hi_, work);
    mpfr_sub(width.get(), width.get(), lo.get(), MPFR_RNDN);
    mpfr_mul(width.get(), width.get(), u.get(), MPFR_RNDN);
    BigFloat out(precision_bits);
    mpfr_add(out.get(), lo.get(), width.get(), MPFR_RNDN);
    return out;
  }

  double approx() const { return approx_; }

  /// Upper bound on |alpha|.
  double magnitude_bound() const {
    if (kind_ == Kind::exact) return std::abs(approx_) * (1.0 + 1e-12);
    return std::max(std::abs(parse_real(lo_, 128).to_double()),
                    std::abs(parse_real(hi_, 128).to_double()));
  }

  bool is_uniform() const { return kind_ == Kind::uniform; }

  std::string describe() const {
    if (kind_ == Kind::exact) return lo_;
    return "uniform(" + lo_ + "," + hi_ + ";seed=" + std::to_string(rng_.seed) +
           ",stream=" + std::to_string(rng_.stream) + ")";
  }

 private:
  enum class Kind { exact, uniform };
  AlphaSpec() = default;

  Kind kind_ = Kind::exact;
  std::string lo_;
  std::string hi_;
  RngSpec rng_{};
  double approx_ = 0.0;
};

/// a_1..a_N at the given precision (default: required_precision with alpha = 1).
/// Non-integer terms carry a relative rounding error of at most n * 2^-precision.
inline std::vector<BigFloat> build_sequence(const SequenceSpec& spec, std::size_t n,
                                            long precision_bits = 0) {
  if (n == 0) throw OutOfRange("sequence length must be >= 1");
  check_lacunarity(spec, n);
  if (precision_bits <= 0) precision_bits = required_precision(spec, 1.0, n);
  std::vector<BigFloat> out;
  out.reserve(n);
  BigFloat geo = BigFloat::from_double(spec.a1, precision_bits);
  BigFloat poly(precision_bits);
  for (std::size_t i = 1; i <= n; ++i) {
    BigFloat term(precision_bits);
    switch (spec.kind) {
      case SequenceKind::geometric:
        mpfr_set(term.get(), geo.get(), MPFR_RNDN);
        mpfr_mul_d(geo.get(), geo.get(), spec.ratio, MPFR_RNDN);
        break;
      case SequenceKind::geometric_plus_poly:
        mpfr_ui_pow_ui(poly.get(), i, spec.poly_degree, MPFR_RNDN);
        mpfr_add(term.get(), geo.get(), poly.get(), MPFR_RNDN);
        mpfr_mul_d(geo.get(), geo.get(), spec.ratio, MPFR_RNDN);
        break;
      case SequenceKind::custom_ratios:
        mpfr_set(term.get(), geo.get(), MPFR_RNDN);
        mpfr_mul_d(geo.get(), geo.get(), spec.ratios[(i - 1) % spec.ratios.size()], MPFR_RNDN);
        break;
    }
    out.push_back(std::move(term));
  }
  return out;
}

/// {alpha a_j} for j = 1..N in index order, at required_precision + extra_bits.
inline std::vector<Phase> frac_phases_unsorted(const SequenceSpec& spec, const AlphaSpec& alpha,
                                               std::size_t n, long extra_bits = 0) {
  if (n == 0) throw OutOfRange("sequence length must be >= 1");
  check_lacunarity(spec, n);
  const long prec = required_precision(spec, alpha.magnitude_bound(), n) + extra_bits;
  if (prec > kMaxPrecisionBits) {
    throw PrecisionExhausted("needs " + std::to_string(prec) + " bits, limit " +
                             std::to_string(kMaxPrecisionBits));
  }
  const BigFloat a = alpha.evaluate(prec);
  BigFloat geo(prec);  // alpha * a1 * C^(n-1), or the running alpha * a_n for custom ratios
  mpfr_mul_d(geo.get(), a.get(), spec.a1, MPFR_RNDN);
  BigFloat x(prec);
  BigFloat poly(prec);

  std::vector<Phase> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    switch (spec.kind) {
      case SequenceKind::geometric:
        out.push_back(frac_phase(geo));
        mpfr_mul_d(geo.get(), geo.get(), spec.ratio, MPFR_RNDN);
        break;
      case SequenceKind::geometric_plus_poly:
        mpfr_ui_pow_ui(poly.get(), i, spec.poly_degree, MPFR_RNDN);
        mpfr_mul(poly.get(), poly.get(), a.get(), MPFR_RNDN);
        mpfr_add(x.get(), geo.get(), poly.get(), MPFR_RNDN);
        out.push_back(frac_phase(x));
        mpfr_mul_d(geo.get(), geo.get(), spec.ratio, MPFR_RNDN);
        break;
      case SequenceKind::custom_ratios:
        out.push_back(frac_phase(geo));
        mpfr_mul_d(geo.get(), geo.get(), spec.ratios[(i - 1) % spec.ratios.size()], MPFR_RNDN);
        break;
    }
  }
  return out;
}

/// N fractional parts on the circle [0,1), sorted ascending (stable on ties).
/// Immutable once built.
class FracPointSet {
 public:
  /// Sorts unsorted phases; indices() keeps the 1-based position in the input.
  static FracPointSet from_phases(std::vector<Phase> unsorted, std::string alpha,
                                  long precision_bits, double max_abs_error) {
    FracPointSet s;
    std::vector<std::size_t> order(unsorted.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return unsorted[x] < unsorted[y]; });
    s.phases_.reserve(order.size());
    s.values_.reserve(order.size());
    s.indices_.reserve(order.size());
    for (std::size_t k : order) {
      s.phases_.push_back(unsorted[k]);
      s.values_.push_back(phase_to_double(unsorted[k]));
      s.indices_.push_back(k + 1);
    }
    s.alpha_ = std::move(alpha);
    s.precision_bits_ = precision_bits;
    s.max_abs_error_ = max_abs_error;
    return s;
  }

  /// Points given directly as doubles in [0,1); used by the random model and tests.
  static FracPointSet from_values(const std::vector<double>& values, std::string alpha = "n/a") {
    std::vector<Phase> phases;
    phases.reserve(values.size());
    for (double v : values) {
      if (!(v >= 0.0 && v < 1.0)) throw OutOfRange("point " + std::to_string(v) + " not in [0,1)");
      phases.push_back(double_to_phase(v));
    }
    return from_phases(std::move(phases), std::move(alpha), 53, 0.0);
  }

  std::size_t n_points() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Phase> phases() const noexcept { return phases_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  const std::string& alpha() const noexcept { return alpha_; }
  long precision_bits() const noexcept { return precision_bits_; }
  double max_abs_error() const noexcept { return max_abs_error_; }

 private:
  FracPointSet() = default;

  std::vector<double> values_;
  std::vector<Phase> phases_;
  std::vector<std::size_t> indices_;
  std::string alpha_;
  long precision_bits_ = 0;
  double max_abs_error_ = 0.0;
};

/// Sorted {alpha a_j}, j = 1..N, each within 2^-64 of the true value.
inline FracPointSet frac_points(const SequenceSpec& spec, const AlphaSpec& alpha, std::size_t n,
                                long extra_bits = 0) {
  auto phases = frac_phases_unsorted(spec, alpha, n, extra_bits);
  const long prec = required_precision(spec, alpha.magnitude_bound(), n) + extra_bits;
  return FracPointSet::from_phases(std::move(phases), alpha.describe(), prec, 0x1.0p-64);
}

/// Debug dump: "index,value" with the value printed to 20 significant digits.
inline void write_points_csv(std::ostream& os, const FracPointSet& points) {
  os << "index,value\n";
  for (std::size_t k = 0; k < points.n_points(); ++k) {
    os << points.indices()[k] << ',' << phase_to_bigfloat(points.phases()[k]).to_string(20) << '\n';
  }
}

}  // namespace lacunary
