#pragma once

#include <string>

#include <gmpxx.h>

#include "twisted/complex_rational.hpp"

namespace twisted {

/// rational * pi^pi_power, kept symbolic so closed forms compare by exact equality.
/// Zero is normalized to pi_power 0.
class ExactValue {
public:
  ExactValue() = default;
  ExactValue(mpq_class rational, int pi_power = 0);  // NOLINT: implicit from rational

  const mpq_class& rational() const noexcept { return rational_; }
  int pi_power() const noexcept { return pi_power_; }
  bool is_zero() const { return sgn(rational_) == 0; }

  ExactValue& operator*=(const ExactValue& o);
  ExactValue& operator/=(const ExactValue& o);
  friend ExactValue operator*(ExactValue a, const ExactValue& b) { return a *= b; }
  friend ExactValue operator/(ExactValue a, const ExactValue& b) { return a /= b; }
  /// Sum; both operands must carry the same power of pi unless one is zero.
  friend ExactValue operator+(const ExactValue& a, const ExactValue& b);
  friend bool operator==(const ExactValue& a, const ExactValue& b) = default;

  /// Integer power (negative allowed for nonzero values).
  ExactValue pow(int e) const;

  /// Natural log of a positive value, accurate for rationals far outside double range.
  double log() const;
  double to_double() const;

  std::string to_string() const;

private:
  mpq_class rational_{0};
  int pi_power_ = 0;
};

/// Complex rational times pi^pi_power: the value of an exact inner product.
struct ExactComplex {
  ComplexRational value;
  int pi_power = 0;

  bool is_zero() const { return value.is_zero(); }
  /// Real part as an ExactValue.
  ExactValue real() const { return ExactValue(value.re, pi_power); }
  ExactValue imag() const { return ExactValue(value.im, pi_power); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.pi_power == b.pi_power && a.value == b.value;
  }
};

/// log of a positive rational with arbitrary-size numerator and denominator.
double log_rational(const mpq_class& q);

}  // namespace twisted
