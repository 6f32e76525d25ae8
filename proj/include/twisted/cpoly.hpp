#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "twisted/complex_rational.hpp"
#include "twisted/multi_index.hpp"

namespace twisted {

/// Exponent pair of a monomial z^a zbar^b, stored as the concatenation (a_1..a_n, b_1..b_n).
class Monomial {
public:
  Monomial() = default;
  explicit Monomial(std::size_t n) : exps_(2 * n, 0) {}
  Monomial(const MultiIndex& a, const MultiIndex& b);

  std::size_t dim() const noexcept { return exps_.size() / 2; }
  int z_exp(std::size_t j) const { return exps_[j]; }
  int zbar_exp(std::size_t j) const { return exps_[dim() + j]; }
  int& z_exp(std::size_t j) { return exps_[j]; }
  int& zbar_exp(std::size_t j) { return exps_[dim() + j]; }
  MultiIndex z_part() const;
  MultiIndex zbar_part() const;
  int degree() const noexcept;
  std::span<const int> raw() const noexcept { return exps_; }

  /// Monomial of the product.
  Monomial operator*(const Monomial& o) const;
  /// Exponents swapped (z <-> zbar): the monomial of the complex conjugate.
  Monomial conj() const;

  bool operator==(const Monomial&) const = default;

private:
  std::vector<int> exps_;
};

/// Graded lexicographic ordering on the concatenated exponent vector.
struct GradedLex {
  bool operator()(const Monomial& x, const Monomial& y) const;
};

/// Polynomial in z_1..z_n, zbar_1..zbar_n with exact complex-rational coefficients.
/// Zero coefficients are never stored.
class CPoly {
public:
  using Terms = std::map<Monomial, ComplexRational, GradedLex>;

  CPoly() = default;
  explicit CPoly(std::size_t n) : n_(n) {}

  static CPoly constant(std::size_t n, const ComplexRational& c);
  static CPoly monomial(const MultiIndex& a, const MultiIndex& b,
                        const ComplexRational& c = ComplexRational{1});
  /// z_j (zero-based j).
  static CPoly z(std::size_t n, std::size_t j);
  /// zbar_j (zero-based j).
  static CPoly zbar(std::size_t n, std::size_t j);

  std::size_t dim() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Coefficient of z^a zbar^b (zero when absent).
  ComplexRational coeff(const Monomial& m) const;

  /// Adds c * monomial, dropping the entry if the result cancels.
  void add_term(const Monomial& m, const ComplexRational& c);

  CPoly& operator+=(const CPoly& o);
  CPoly& operator-=(const CPoly& o);
  CPoly& operator*=(const ComplexRational& c);
  friend CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
  friend CPoly operator-(CPoly a, const CPoly& b) { return a -= b; }
  friend CPoly operator*(CPoly a, const ComplexRational& c) { return a *= c; }
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend bool operator==(const CPoly& a, const CPoly& b) {
    return a.n_ == b.n_ && a.terms_.size() == b.terms_.size() &&
           std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                      [](const auto& x, const auto& y) {
                        return x.first == y.first && x.second == y.second;
                      });
  }

  /// Complex conjugate: swaps exponents and conjugates coefficients.
  CPoly conj() const;

  /// Partial derivative in z_j (zero-based).
  CPoly d_z(std::size_t j) const;
  /// Partial derivative in zbar_j (zero-based).
  CPoly d_zbar(std::size_t j) const;
  /// Multiplication by z_j / zbar_j.
  CPoly times_z(std::size_t j) const;
  CPoly times_zbar(std::size_t j) const;

  /// Evaluates at the point z (zbar taken as the conjugate of z).
  std::complex<double> evaluate(std::span<const std::complex<double>> z) const;

private:
  std::size_t n_ = 0;
  Terms terms_;
};

}  // namespace twisted
