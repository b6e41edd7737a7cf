// bigfloat.hpp
//
// Thin RAII layer over MPFR plus the fixed-point "phase" representation used
// for fractional parts. A Phase stores {x} in [0,1) as an unsigned 128-bit
// integer in units of 2^-128, so n*{x} mod 1 is exact integer multiplication.
#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "lacunary/errors.hpp"

namespace lacunary {

static_assert(sizeof(unsigned long) == 8, "MPFR ui conversions assume 64-bit unsigned long");

using Phase = unsigned __int128;

/// Upper limit on working precision; larger requests raise PrecisionExhausted.
inline constexpr long kMaxPrecisionBits = 1L << 24;

class BigFloat {
 public:
  explicit BigFloat(long precision_bits) {
    if (precision_bits < MPFR_PREC_MIN || precision_bits > kMaxPrecisionBits) {
      throw PrecisionExhausted("requested " + std::to_string(precision_bits) +
                               " bits, backend limit is " + std::to_string(kMaxPrecisionBits));
    }
    mpfr_init2(value_, precision_bits);
    mpfr_set_zero(value_, 1);
  }

  BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }

  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
  }

  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
      mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
  }

  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
  }

  ~BigFloat() { mpfr_clear(value_); }

  static BigFloat from_double(double v, long precision_bits) {
    BigFloat out(std::max<long>(precision_bits, 53));
    mpfr_set_d(out.get(), v, MPFR_RNDN);
    return out;
  }

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }

  long precision() const noexcept { return static_cast<long>(mpfr_get_prec(value_)); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

  std::string to_string(int significant_digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", significant_digits, value_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

 private:
  mpfr_t value_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

inline void set_str_or_throw(mpfr_ptr out, const std::string& text) {
  if (text.empty() || mpfr_set_str(out, text.c_str(), 0, MPFR_RNDN) != 0) {
    throw InvalidSpec("cannot parse real number '" + text + "'");
  }
}

}  // namespace detail

/// Parses "p/q", a decimal literal, or a C99 hex float ("0x1.8p0") at the given precision.
inline BigFloat parse_real(const std::string& text, long precision_bits) {
  const std::string t = detail::trim(text);
  BigFloat out(precision_bits);
  const auto slash = t.find('/');
  if (slash == std::string::npos) {
    detail::set_str_or_throw(out.get(), t);
    return out;
  }
  BigFloat den(precision_bits + 64);
  BigFloat num(precision_bits + 64);
  detail::set_str_or_throw(num.get(), detail::trim(t.substr(0, slash)));
  detail::set_str_or_throw(den.get(), detail::trim(t.substr(slash + 1)));
  if (mpfr_zero_p(den.get())) throw InvalidSpec("zero denominator in '" + t + "'");
  mpfr_div(out.get(), num.get(), den.get(), MPFR_RNDN);
  return out;
}

/// Exact hex-float spelling of a double, accepted back by parse_real.
inline std::string hex_literal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

/// {x} = x - floor(x), truncated to 128 fractional bits.
inline Phase frac_phase(const BigFloat& x) {
  mpfr_t f;
  mpfr_init2(f, 192);
  mpfr_frac(f, x.get(), MPFR_RNDZ);
  if (mpfr_sgn(f) < 0) mpfr_add_ui(f, f, 1, MPFR_RNDZ);
  mpfr_mul_2ui(f, f, 64, MPFR_RNDN);
  const unsigned long hi = mpfr_get_ui(f, MPFR_RNDZ);
  mpfr_sub_ui(f, f, hi, MPFR_RNDN);
  mpfr_mul_2ui(f, f, 64, MPFR_RNDN);
  const unsigned long lo = mpfr_get_ui(f, MPFR_RNDZ);
  mpfr_clear(f);
  return (static_cast<Phase>(hi) << 64) | lo;
}

inline std::uint64_t phase_hi(Phase p) { return static_cast<std::uint64_t>(p >> 64); }

/// Nearest double below 1; values that would round up to 1.0 are clamped.
inline double phase_to_double(Phase p) {
  const double v = std::ldexp(static_cast<double>(phase_hi(p)), -64) +
                   std::ldexp(static_cast<double>(static_cast<std::uint64_t>(p)), -128);
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

/// Exact: a double in [0,1) has at most 53 significant bits.
inline Phase double_to_phase(double v) {
  const double scaled = std::ldexp(v, 64);
  const double hi = std::floor(scaled);
  const double lo = std::ldexp(scaled - hi, 64);
  return (static_cast<Phase>(static_cast<std::uint64_t>(hi)) << 64) |
         static_cast<std::uint64_t>(lo);
}

inline BigFloat phase_to_bigfloat(Phase p) {
  BigFloat out(192);
  mpfr_set_ui(out.get(), phase_hi(p), MPFR_RNDN);
  mpfr_mul_2ui(out.get(), out.get(), 64, MPFR_RNDN);
  mpfr_add_ui(out.get(), out.get(), static_cast<unsigned long>(static_cast<std::uint64_t>(p)), MPFR_RNDN);
  mpfr_div_2ui(out.get(), out.get(), 128, MPFR_RNDN);
  return out;
}

}  // namespace lacunary
