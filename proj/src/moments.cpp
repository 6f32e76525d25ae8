#include "twisted/moments.hpp"

#include <vector>

#include "twisted/errors.hpp"

namespace twisted {

namespace {

const mpz_class& factorial_cached(std::vector<mpz_class>& cache, int k) {
  while (static_cast<int>(cache.size()) <= k) {
    cache.push_back(cache.empty() ? mpz_class(1) : cache.back() * static_cast<unsigned long>(cache.size()));
  }
  return cache[static_cast<std::size_t>(k)];
}

// Moment of z^e zbar^e with weight exp(-t|z|^2), without the pi^n factor.
mpq_class diagonal_moment(std::span<const int> e, const mpq_class& t, std::vector<mpz_class>& facts) {
  mpz_class num = 1;
  long total = 0;
  for (int ej : e) {
    num *= factorial_cached(facts, ej);
    total += ej + 1;
  }
  mpz_class tn, td;
  mpz_pow_ui(tn.get_mpz_t(), t.get_num_mpz_t(), static_cast<unsigned long>(total));
  mpz_pow_ui(td.get_mpz_t(), t.get_den_mpz_t(), static_cast<unsigned long>(total));
  mpq_class out(num * td, tn);
  out.canonicalize();
  return out;
}

}  // namespace

ExactValue gaussian_moment(const MultiIndex& a, const MultiIndex& b, const mpq_class& t) {
  if (sgn(t) <= 0) throw ValidationError("moment width must be positive");
  if (a.size() != b.size()) throw ValidationError("moment exponent lengths differ");
  if (a != b) return ExactValue{};
  std::vector<mpz_class> facts;
  return ExactValue(diagonal_moment(a.entries(), t, facts), static_cast<int>(a.size()));
}

ExactComplex inner_exact(const GaussianFn& g, const GaussianFn& h) {
  if (g.dim() != h.dim()) throw ValidationError("inner product dimension mismatch");
  const std::size_t n = g.dim();
  const mpq_class t = (g.width() + h.width()) / 2;
  std::vector<mpz_class> facts;
  std::vector<int> e(n);
  ComplexRational sum;
  // g term z^{a1} zbar^{b1}, conj(h term) z^{b2} zbar^{a2}; nonzero iff a1 + b2 == b1 + a2.
  for (const auto& [mg, cg] : g.poly().terms()) {
    for (const auto& [mh, ch] : h.poly().terms()) {
      bool diagonal = true;
      for (std::size_t j = 0; j < n && diagonal; ++j) {
        e[j] = mg.z_exp(j) + mh.zbar_exp(j);
        diagonal = e[j] == mg.zbar_exp(j) + mh.z_exp(j);
      }
      if (!diagonal) continue;
      sum += cg * ch.conj() * diagonal_moment(e, t, facts);
    }
  }
  return ExactComplex{sum, sum.is_zero() ? 0 : static_cast<int>(n)};
}

GaussianFn modulus_squared(const GaussianFn& g) {
  return GaussianFn(g.poly() * g.poly().conj(), g.width() * 2);
}

ExactValue lp_norm_exact_even(const GaussianFn& g, int p) {
  if (p < 2 || p % 2 != 0) throw ValidationError("exact Lp norms need an even integer p >= 2");
  const std::size_t n = g.dim();
  const CPoly mod2 = g.poly() * g.poly().conj();
  CPoly power = CPoly::constant(n, ComplexRational{1});
  for (int i = 0; i < p / 2; ++i) power = power * mod2;
  // |g|^p = (p pbar)^{p/2} exp(-p t |z|^2 / 2)
  const mpq_class t = g.width() * p / 2;
  std::vector<mpz_class> facts;
  std::vector<int> e(n);
  mpq_class sum = 0;
  for (const auto& [m, c] : power.terms()) {
    bool diagonal = true;
    for (std::size_t j = 0; j < n && diagonal; ++j) {
      e[j] = m.z_exp(j);
      diagonal = m.z_exp(j) == m.zbar_exp(j);
    }
    if (!diagonal) continue;
    // (p pbar)^{p/2} is real, so diagonal coefficients are real.
    sum += c.re * diagonal_moment(e, t, facts);
  }
  return ExactValue(sum, static_cast<int>(n));
}

}  // namespace twisted
