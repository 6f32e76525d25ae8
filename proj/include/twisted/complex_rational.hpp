#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace twisted {

/// Exact complex number with arbitrary-precision rational parts.
struct ComplexRational {
  mpq_class re{0};
  mpq_class im{0};

  ComplexRational() = default;
  ComplexRational(mpq_class real) : re(std::move(real)) {}  // NOLINT: implicit from rational
  ComplexRational(long real) : re(real) {}                  // NOLINT: implicit from integer
  ComplexRational(mpq_class real, mpq_class imag) : re(std::move(real)), im(std::move(imag)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  ComplexRational conj() const { return {re, -im}; }
  /// |c|^2, exact.
  mpq_class norm() const { return re * re + im * im; }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  ComplexRational& operator+=(const ComplexRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  ComplexRational& operator*=(const ComplexRational& o) {
    mpq_class r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  ComplexRational& operator*=(const mpq_class& s) {
    re *= s;
    im *= s;
    return *this;
  }

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator*(ComplexRational a, const mpq_class& s) { return a *= s; }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  /// Exact division; throws ValidationError on division by zero.
  ComplexRational operator/(const ComplexRational& o) const;
};

/// Canonical decimal-free string of a rational: "p/q", or "p" when q == 1.
std::string rational_to_string(const mpq_class& q);
/// Parses "p/q" or "p"; throws ValidationError on malformed input or zero denominator.
mpq_class rational_from_string(const std::string& s);

}  // namespace twisted
