#include "twisted/eigenbasis.hpp"

#include <cassert>
#include <cmath>
#include <math.h>  // lgamma_r
#include <numbers>
#include <stdexcept>

#include "twisted/errors.hpp"

namespace twisted {

EigenLabel::EigenLabel(MultiIndex a, MultiIndex b) : alpha(std::move(a)), beta(std::move(b)) {
  if (alpha.size() != beta.size()) throw ValidationError("alpha and beta lengths differ");
  if (alpha.size() == 0) throw ValidationError("label dimension must be positive");
}

double SpectrumPoint::lambda() const { return std::sqrt(static_cast<double>(mu())); }

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

Eigenfunction build_eigenfunction(const EigenLabel& label) {
  const std::size_t n = label.dim();
  GaussianFn f(CPoly::monomial(label.beta, MultiIndex(n)));
  for (std::size_t j = 0; j < n; ++j) {
    for (int i = 0; i < label.alpha[j]; ++i) f = ladder_raise(f, j + 1);
  }
  Eigenfunction out{label, std::move(f), label.eigenvalue()};
#ifndef NDEBUG
  if (!(apply_L(out.fn) == out.fn * ComplexRational{out.eigenvalue})) {
    throw std::logic_error("eigenfunction identity failed for " + label.alpha.to_string() +
                           label.beta.to_string());
  }
#endif
  return out;
}

ExactValue exact_l2_norm_sq(const EigenLabel& label) {
  return ExactValue(mpq_class(label.alpha.factorial() * label.beta.factorial()),
                    static_cast<int>(label.dim()));
}

mpz_class eigen_value_at_origin(const EigenLabel& label) {
  return label.alpha == label.beta ? label.alpha.factorial() : mpz_class(0);
}

GaussianFn build_radial(std::size_t n, int k) {
  if (k < 0) throw ValidationError("radial level must be nonnegative");
  GaussianFn sum = GaussianFn::zero(n);
  for (const MultiIndex& alpha : compositions(n, k)) {
    sum += build_eigenfunction(EigenLabel(alpha, alpha)).fn * ComplexRational(mpq_class(multinomial(alpha)));
  }
  mpz_class four_k;
  mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
  return sum * ComplexRational(mpq_class(mpz_class(1), four_k));
}

RadialClosedForms radial_closed_forms(std::size_t n, int k) {
  if (k < 0) throw ValidationError("radial level must be nonnegative");
  mpz_class four_k, fact;
  mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
  const mpz_class count = binomial(static_cast<long>(n) + k - 1, k);
  RadialClosedForms out;
  out.value_at_zero = ExactValue(mpq_class(fact * count, four_k));
  out.norm_sq = ExactValue(mpq_class(fact * fact * count, four_k * four_k), static_cast<int>(n));
  return out;
}

std::vector<EigenLabel> enumerate_labels(std::size_t n, int k, int max_beta) {
  if (k < 0 || max_beta < 0) throw ValidationError("k and B must be nonnegative");
  std::vector<EigenLabel> out;
  for (const MultiIndex& alpha : compositions(n, k)) {
    for (int b = 0; b <= max_beta; ++b) {
      for (const MultiIndex& beta : compositions(n, b)) out.emplace_back(alpha, beta);
    }
  }
  return out;
}

double laguerre(int m, double a, double x) {
  if (m < 0) throw ValidationError("Laguerre degree must be nonnegative");
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = 1.0 + a - x;
  for (int j = 1; j < m; ++j) {
    const double next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// One complex coordinate of f_{a,b}/||f_{a,b}|| (1-D norm sqrt(pi a! b!)):
//   a >= b: (-1)^{a+b} b! zbar^{a-b} L_b^{(a-b)}(|z|^2) e^{-|z|^2/2}
//   a <  b: a! z^{b-a} L_a^{(b-a)}(|z|^2) e^{-|z|^2/2}
std::complex<double> normalized_factor(int a, int b, std::complex<double> z) {
  const double r2 = std::norm(z);
  const int m = std::min(a, b);
  const int shift = std::abs(a - b);
  if (shift > 0 && r2 == 0.0) return {0.0, 0.0};
  double log_mag = log_gamma(m + 1.0) - 0.5 * (log_gamma(a + 1.0) + log_gamma(b + 1.0)) -
                   0.5 * std::log(std::numbers::pi) - 0.5 * r2;
  if (shift > 0) log_mag += 0.5 * shift * std::log(r2);
  const double lag = laguerre(m, shift, r2);
  const double theta = std::arg(z);
  const double phase = a >= b ? -shift * theta : shift * theta;
  const double sign = (a >= b && (a + b) % 2 != 0) ? -1.0 : 1.0;
  return std::polar(sign * lag * std::exp(log_mag), phase);
}

}  // namespace

std::complex<double> normalized_eigen_value(const EigenLabel& label,
                                            std::span<const std::complex<double>> z) {
  if (z.size() != label.dim()) throw ValidationError("evaluation point has wrong dimension");
  std::complex<double> out{1.0, 0.0};
  for (std::size_t j = 0; j < label.dim(); ++j) out *= normalized_factor(label.alpha[j], label.beta[j], z[j]);
  return out;
}

RadialProfile::RadialProfile(std::size_t n, int k) : n_(n), k_(k) {
  if (n == 0) throw ValidationError("dimension must be positive");
  if (k < 0) throw ValidationError("radial level must be nonnegative");
  laguerre_at_zero_ = laguerre(k, static_cast<double>(n) - 1.0, 0.0);
}

double RadialProfile::operator()(double r) const {
  const double r2 = r * r;
  return laguerre(k_, static_cast<double>(n_) - 1.0, r2) / laguerre_at_zero_ * std::exp(-0.5 * r2);
}

double RadialProfile::log_value_at_zero() const {
  // 4^{-k} k! binom(n+k-1, k)
  const double n = static_cast<double>(n_);
  return -k_ * std::log(4.0) + log_gamma(k_ + 1.0) + log_gamma(n + k_) - log_gamma(k_ + 1.0) -
         log_gamma(n);
}

double RadialProfile::log_l2_norm() const {
  // (4^{-2k} pi^n k!^2 binom(n+k-1,k))^{1/2}
  const double n = static_cast<double>(n_);
  const double log_binom = log_gamma(n + k_) - log_gamma(k_ + 1.0) - log_gamma(n);
  return 0.5 * (-2.0 * k_ * std::log(4.0) + n * std::log(std::numbers::pi) +
                2.0 * log_gamma(k_ + 1.0) + log_binom);
}

double half_height_radius(const RadialProfile& profile) {
  // Bracket on a grid finer than the first oscillation scale 1/sqrt(n + 2k), then bisect.
  const double step = 0.01 / std::sqrt(static_cast<double>(profile.dim()) + 2.0 * profile.level());
  double lo = 0.0;
  double hi = step;
  while (profile(hi) > 0.5) {
    lo = hi;
    hi += step;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (profile(mid) > 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace twisted
