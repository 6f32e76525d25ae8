#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "twisted/eigenbasis.hpp"
#include "twisted/gaussian_fn.hpp"

namespace twisted {

using Point = std::vector<std::complex<double>>;
using PointFn = std::function<std::complex<double>(std::span<const std::complex<double>>)>;

/// A numeric function on C^n plus the structural hints the quadrature engine uses to lay out
/// nodes. Hints describe the modulus: |u(z)| <~ |poly of degree `degree`| * e^{-decay |z - center|^2/2}.
struct Evaluator {
  enum class Symmetry {
    General,     // no structure assumed
    PolyRadial,  // |u| depends only on (|z_1|, ..., |z_n|)
    Radial,      // u(z) = radial(|z|)
  };

  std::size_t n = 1;
  PointFn fn;
  Symmetry symmetry = Symmetry::General;
  std::function<double(double)> radial;  // set iff symmetry == Radial
  double decay = 1.0;
  double degree = 0.0;
  Point center;  // empty means the origin

  std::complex<double> operator()(std::span<const std::complex<double>> z) const { return fn(z); }
  double center_norm() const;
};

/// Wraps an exact GaussianFn, detecting radial and poly-radial structure from its exponents.
Evaluator make_evaluator(const GaussianFn& g);

/// f_k / f_k(0) through the stable Laguerre profile.
Evaluator make_radial_evaluator(const RadialProfile& profile);

/// sum_i c_i f_{L_i} / ||f_{L_i}||_2 evaluated through normalized_eigen_value.
Evaluator make_eigen_combination(std::vector<EigenLabel> labels, std::vector<std::complex<double>> coeffs);

/// True when g depends on z only through |z|^2.
bool is_radial(const GaussianFn& g);
/// True when |g| depends only on (|z_1|, ..., |z_n|): every term has the same a - b.
bool is_poly_radial(const GaussianFn& g);

}  // namespace twisted
