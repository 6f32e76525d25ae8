#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "twisted/cpoly.hpp"

namespace twisted {

/// p(z, zbar) * exp(-t |z|^2 / 2) on C^n = R^{2n}, exact polynomial and exact width t > 0.
class GaussianFn {
public:
  GaussianFn() = default;
  /// Throws ValidationError unless t > 0.
  GaussianFn(CPoly poly, mpq_class width = 1);

  /// exp(-|z|^2/2) in n complex dimensions.
  static GaussianFn ground_state(std::size_t n);
  static GaussianFn zero(std::size_t n, mpq_class width = 1);

  std::size_t dim() const noexcept { return poly_.dim(); }
  const CPoly& poly() const noexcept { return poly_; }
  const mpq_class& width() const noexcept { return width_; }
  bool is_zero() const noexcept { return poly_.is_zero(); }
  int degree() const { return poly_.degree(); }

  GaussianFn& operator+=(const GaussianFn& o);
  GaussianFn& operator-=(const GaussianFn& o);
  GaussianFn& operator*=(const ComplexRational& c);
  friend GaussianFn operator+(GaussianFn a, const GaussianFn& b) { return a += b; }
  friend GaussianFn operator-(GaussianFn a, const GaussianFn& b) { return a -= b; }
  friend GaussianFn operator*(GaussianFn a, const ComplexRational& c) { return a *= c; }
  friend bool operator==(const GaussianFn& a, const GaussianFn& b) {
    return a.width_ == b.width_ && a.poly_ == b.poly_;
  }

  /// p(z, zbar) exp(-t|z|^2/2) at a point of C^n.
  std::complex<double> evaluate(std::span<const std::complex<double>> z) const;

private:
  CPoly poly_;
  mpq_class width_{1};
};

// Exact derivatives of the full function p e^{-t|z|^2/2}, any width. One-based j.
GaussianFn d_z(const GaussianFn& g, std::size_t j);
GaussianFn d_zbar(const GaussianFn& g, std::size_t j);

/// Raising operator -D_j^*/2 on the width-1 class: p |-> d_{z_j} p - zbar_j p.
/// Coordinates are one-based (1 <= j <= n). Raises the L-eigenvalue by 2.
GaussianFn ladder_raise(const GaussianFn& g, std::size_t j);

/// Lowering operator D_j = 2 d_{zbar_j} + z_j on the width-1 class: p |-> 2 d_{zbar_j} p.
/// One-based j. Annihilates holomorphic polynomials.
GaussianFn ladder_lower(const GaussianFn& g, std::size_t j);

/// D_j^* = -2 * ladder_raise.
GaussianFn ladder_adjoint(const GaussianFn& g, std::size_t j);

/// Twisted Laplacian on the width-1 class:
/// p |-> n p + sum_j (2 zbar_j d_{zbar_j} p - 2 d_{z_j} d_{zbar_j} p).
GaussianFn apply_L(const GaussianFn& g);

/// Euclidean Laplacian on R^{2n}, 4 sum_j d_{z_j} d_{zbar_j}, applied exactly to g (any width).
GaussianFn euclidean_laplacian(const GaussianFn& g);

}  // namespace twisted
