#pragma once

#include "twisted/exact_value.hpp"
#include "twisted/gaussian_fn.hpp"
#include "twisted/multi_index.hpp"

namespace twisted {

/// Integral over C^n of z^a zbar^b exp(-t|z|^2):
/// zero unless a == b, otherwise prod_j pi a_j! / t^{a_j+1}.
ExactValue gaussian_moment(const MultiIndex& a, const MultiIndex& b, const mpq_class& t);

/// <g, h> = integral of g * conj(h), exact. Widths may differ.
ExactComplex inner_exact(const GaussianFn& g, const GaussianFn& h);

/// ||g||_p^p for even integer p >= 2, exact. The p-th root is left to the caller.
ExactValue lp_norm_exact_even(const GaussianFn& g, int p);

/// |g|^2 = g * conj(g) as a GaussianFn of doubled width.
GaussianFn modulus_squared(const GaussianFn& g);

}  // namespace twisted
