#pragma once

#include <cmath>
#include <cstdint>

namespace evq {

// A positive-or-zero real carried as mantissa * 2^exponent with the mantissa
// normalized into [0.5, 1). Normalization constants G(M) span thousands of
// decimal orders of magnitude on large networks (the 60-station example needs
// log10 G(763) ~ -2100), far beyond double range, while every reported
// quantity is a ratio of neighbouring G values. Keeping a per-value binary
// exponent makes those ratios exact to machine precision.
//
// Only the operations the convolution solver needs are provided; values are
// never negative there (k_i(n) >= 0, G(m) > 0), and subtraction guards the
// one place it appears (deconvolution) at the call site.
struct ScaledReal {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static ScaledReal zero() { return {}; }
  static ScaledReal one() { return from(1.0); }

  static ScaledReal from(double v) {
    ScaledReal r;
    if (v == 0.0) return r;
    int e = 0;
    r.mantissa = std::frexp(v, &e);
    r.exponent = e;
    return r;
  }

  bool is_zero() const { return mantissa == 0.0; }

  // Lossy: overflows to inf / underflows to 0 outside double range.
  double to_double() const {
    if (mantissa == 0.0) return 0.0;
    if (exponent > 1030) return mantissa * HUGE_VAL;
    if (exponent < -1070) return 0.0;
    return std::ldexp(mantissa, static_cast<int>(exponent));
  }

  double log10() const {
    return std::log10(mantissa) +
           static_cast<double>(exponent) * 0.30102999566398119521;
  }

 private:
  static ScaledReal make(double m, std::int64_t e) {
    ScaledReal r;
    if (m == 0.0) return r;
    int shift = 0;
    r.mantissa = std::frexp(m, &shift);
    r.exponent = e + shift;
    return r;
  }

 public:
  friend ScaledReal operator*(ScaledReal a, ScaledReal b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return make(a.mantissa * b.mantissa, a.exponent + b.exponent);
  }

  friend ScaledReal operator/(ScaledReal a, ScaledReal b) {
    if (a.is_zero()) return zero();
    return make(a.mantissa / b.mantissa, a.exponent - b.exponent);
  }

  friend ScaledReal operator+(ScaledReal a, ScaledReal b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.exponent < b.exponent) {
      ScaledReal t = a;
      a = b;
      b = t;
    }
    const std::int64_t d = a.exponent - b.exponent;
    // The smaller addend is below one ulp of the larger; adding it is a no-op.
    if (d > 64) return a;
    return make(a.mantissa + std::ldexp(b.mantissa, -static_cast<int>(d)),
                a.exponent);
  }

  // May produce a negative result; callers that require nonnegativity check
  // via ratio_to() or to_double() sign themselves.
  friend ScaledReal operator-(ScaledReal a, ScaledReal b) {
    if (b.is_zero()) return a;
    ScaledReal nb = b;
    nb.mantissa = -nb.mantissa;
    if (a.is_zero()) return nb;
    if (a.exponent >= nb.exponent) {
      const std::int64_t d = a.exponent - nb.exponent;
      if (d > 64) return a;
      return make(a.mantissa + std::ldexp(nb.mantissa, -static_cast<int>(d)),
                  a.exponent);
    }
    const std::int64_t d = nb.exponent - a.exponent;
    if (d > 64) return nb;
    return make(nb.mantissa + std::ldexp(a.mantissa, -static_cast<int>(d)),
                nb.exponent);
  }

  // a/b as a plain double; accurate whenever the true ratio is representable.
  double ratio_to(ScaledReal b) const {
    if (is_zero()) return 0.0;
    const std::int64_t d = exponent - b.exponent;
    if (d > 1070) return (mantissa / b.mantissa) * HUGE_VAL;
    if (d < -1070) return 0.0;
    return std::ldexp(mantissa / b.mantissa, static_cast<int>(d));
  }

  friend bool operator<(ScaledReal a, ScaledReal b) {
    const bool an = a.mantissa < 0.0, bn = b.mantissa < 0.0;
    if (an != bn) return an;
    if (a.is_zero()) return b.mantissa > 0.0;
    if (b.is_zero()) return a.mantissa < 0.0;
    if (a.exponent != b.exponent) {
      return an ? (a.exponent > b.exponent) : (a.exponent < b.exponent);
    }
    return a.mantissa < b.mantissa;
  }
};

}  // namespace evq
