#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "twisted/eigenbasis.hpp"
#include "twisted/evaluator.hpp"
#include "twisted/exact_value.hpp"
#include "twisted/gaussian_fn.hpp"

namespace twisted {

/// Finite exact expansion g = sum c_{alpha,beta} f_{alpha,beta}.
struct EigenExpansion {
  std::size_t n = 1;
  std::vector<std::pair<EigenLabel, ComplexRational>> entries;

  /// sum c f_{alpha,beta}, exact.
  GaussianFn reconstruct() const;
  /// sum |c|^2 pi^n alpha! beta!, exact.
  ExactValue l2_norm_sq() const;
};

/// Expansion in the eigenbasis; coefficients are <g, f> / (pi^n alpha! beta!). Requires width 1.
EigenExpansion expand(const GaussianFn& g);

/// Spectral projection onto the eigenspace n + 2k, exact. Requires width 1.
GaussianFn project(const GaussianFn& g, int k);

/// Projection kernel on the diagonal at the origin, K(0,0) = pi^{-n} binom(n+k-1, k).
ExactValue kernel_diag_origin(std::size_t n, int k);

/// f(x, y) |-> e^{i(a.y - b.x)} f(x - a, y - b), a shift by w = a + ib.
struct TwistedTranslation {
  std::vector<double> a;
  std::vector<double> b;

  std::size_t dim() const noexcept { return a.size(); }
  Point shift() const;
};

/// Numeric evaluator of the twisted translate (the exponential factor leaves the exact class).
Evaluator twisted_translate(const Evaluator& g, const TwistedTranslation& tt);
Evaluator twisted_translate(const GaussianFn& g, const TwistedTranslation& tt);

}  // namespace twisted
