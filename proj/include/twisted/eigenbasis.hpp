#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "twisted/exact_value.hpp"
#include "twisted/gaussian_fn.hpp"
#include "twisted/multi_index.hpp"

namespace twisted {

/// Index (alpha, beta) of the special Hermite function f_{alpha,beta}.
struct EigenLabel {
  MultiIndex alpha;
  MultiIndex beta;

  EigenLabel() = default;
  /// Throws ValidationError if the lengths differ or are zero.
  EigenLabel(MultiIndex a, MultiIndex b);

  std::size_t dim() const noexcept { return alpha.size(); }
  /// n + 2|alpha|.
  long eigenvalue() const { return static_cast<long>(dim()) + 2L * alpha.order(); }
  /// Landau level k = |alpha|.
  int level() const { return alpha.order(); }

  auto operator<=>(const EigenLabel&) const = default;
  bool operator==(const EigenLabel&) const = default;
};

struct Eigenfunction {
  EigenLabel label;
  GaussianFn fn;
  long eigenvalue = 0;
};

/// A point n + 2k = lambda^2 of the spectrum.
struct SpectrumPoint {
  std::size_t n = 1;
  long k = 0;

  long mu() const { return static_cast<long>(n) + 2 * k; }
  double lambda() const;
};

/// f_{alpha,beta} = (-D^*/2)^alpha (z^beta e^{-|z|^2/2}), built by |alpha| ladder raises.
/// Its top-degree monomial is (-1)^{|alpha|} zbar^alpha z^beta.
Eigenfunction build_eigenfunction(const EigenLabel& label);

/// ||f_{alpha,beta}||_2^2 = pi^n alpha! beta!.
ExactValue exact_l2_norm_sq(const EigenLabel& label);

/// f_{alpha,beta}(0) = alpha! if alpha == beta, else 0.
mpz_class eigen_value_at_origin(const EigenLabel& label);

/// Radial eigenfunction f_k = 4^{-k} sum_{|alpha|=k} binom(k; alpha) f_{alpha,alpha}, eigenvalue n + 2k.
GaussianFn build_radial(std::size_t n, int k);

struct RadialClosedForms {
  ExactValue value_at_zero;  // 4^{-k} k! binom(n+k-1, k)
  ExactValue norm_sq;        // 4^{-2k} pi^n k!^2 binom(n+k-1, k)
};
RadialClosedForms radial_closed_forms(std::size_t n, int k);

/// Labels with |alpha| = k and |beta| <= max_beta. For each alpha (reverse-lex), beta runs
/// over increasing |beta|, reverse-lex within each order.
std::vector<EigenLabel> enumerate_labels(std::size_t n, int k, int max_beta);

/// Generalized Laguerre polynomial L_m^{(a)}(x) by the three-term recurrence.
double laguerre(int m, double a, double x);

/// f_{alpha,beta}(z) / ||f_{alpha,beta}||_2, evaluated through Laguerre closed forms in
/// log-space. Stable for large |alpha| where the monomial expansion cancels catastrophically.
std::complex<double> normalized_eigen_value(const EigenLabel& label,
                                            std::span<const std::complex<double>> z);

/// Profile of f_k normalized to 1 at the origin:
/// f_k(z) = f_k(0) * profile(|z|) with profile(r) = L_k^{(n-1)}(r^2) / L_k^{(n-1)}(0) * e^{-r^2/2}.
class RadialProfile {
public:
  RadialProfile(std::size_t n, int k);

  std::size_t dim() const noexcept { return n_; }
  int level() const noexcept { return k_; }
  double operator()(double r) const;
  /// log f_k(0) and log ||f_k||_2, from the closed forms in log-space.
  double log_value_at_zero() const;
  double log_l2_norm() const;

private:
  std::size_t n_;
  int k_;
  double laguerre_at_zero_;
};

/// Smallest r > 0 where the normalized profile first drops to 1/2.
double half_height_radius(const RadialProfile& profile);

/// c with f_k(z) >= f_k(0)/2 for |z| <= c / sqrt(n + 2k), fitted over n in {1, 2}, k <= 64.
inline constexpr double kHalfHeightConstant = 1.07;

/// Natural log of Gamma(x) for x > 0 (reentrant).
double log_gamma(double x);

}  // namespace twisted
