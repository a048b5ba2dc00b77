#pragma once

// Scalar types used by the transfer engine and the analytic module, plus a
// value-with-binary-exponent wrapper that keeps Λ^M growth out of the mantissa.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdlib>

namespace loop3pt {

namespace bmp = boost::multiprecision;

using Real50 = bmp::number<bmp::mpfr_float_backend<50, bmp::allocate_stack>, bmp::et_off>;
using Real100 = bmp::number<bmp::mpfr_float_backend<100, bmp::allocate_stack>, bmp::et_off>;

template <class S>
inline double to_double(const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

template <class S>
inline S from_double(double x) {
  return S(x);
}

template <class S>
inline S pi_value() {
  if constexpr (std::is_same_v<S, double>) {
    return M_PI;
  } else {
    return boost::math::constants::pi<S>();
  }
}

// Exact multiplication by 2^k.
template <class S>
inline S scale2(const S& x, long k) {
  using std::ldexp;
  return ldexp(x, static_cast<int>(k));
}

// Exponent e with |x| in [2^(e-1), 2^e); 0 for x == 0.
template <class S>
inline long exponent2(const S& x) {
  using std::frexp;
  int e = 0;
  if (x == 0) return 0;
  frexp(x, &e);
  return e;
}

// value = mantissa * 2^exp2
template <class S>
struct Scaled {
  S mantissa{0};
  long exp2 = 0;

  double log10_abs() const {
    using std::abs;
    using std::log10;
    return std::log10(std::abs(to_double(mantissa))) + static_cast<double>(exp2) * std::log10(2.0);
  }
  // Mantissa and decimal exponent, for serialization.
  std::pair<double, long> decimal() const {
    if (mantissa == 0) return {0.0, 0};
    double l = log10_abs();
    long e10 = static_cast<long>(std::floor(l));
    double sign = mantissa < 0 ? -1.0 : 1.0;
    return {sign * std::pow(10.0, l - static_cast<double>(e10)), e10};
  }
};

template <class S>
struct Complex {
  S re{0};
  S im{0};

  Complex operator+(const Complex& o) const { return {re + o.re, im + o.im}; }
  Complex operator-(const Complex& o) const { return {re - o.re, im - o.im}; }
  Complex operator*(const Complex& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  Complex operator*(const S& s) const { return {re * s, im * s}; }
  S norm2() const { return re * re + im * im; }
  S abs() const {
    using std::sqrt;
    return sqrt(norm2());
  }
};

}  // namespace loop3pt
