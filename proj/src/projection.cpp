#include "twisted/projection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "twisted/errors.hpp"
#include "twisted/moments.hpp"

namespace twisted {

GaussianFn EigenExpansion::reconstruct() const {
  GaussianFn sum = GaussianFn::zero(n);
  for (const auto& [label, c] : entries) sum += build_eigenfunction(label).fn * c;
  return sum;
}

ExactValue EigenExpansion::l2_norm_sq() const {
  ExactValue sum;
  for (const auto& [label, c] : entries) {
    sum = sum + ExactValue(c.norm()) * exact_l2_norm_sq(label);
  }
  return sum;
}

namespace {

void require_unit_width(const GaussianFn& g) {
  if (g.width() != 1) throw ValidationError("spectral expansion requires width t = 1");
}

// The top monomial of f_{alpha,beta} is zbar^alpha z^beta and its lower terms are
// zbar^{alpha-j} z^{beta-j}, so z^a zbar^b can only involve labels (b - j, a - j), 0 <= j <= min(a, b).
std::set<EigenLabel> candidate_labels(const GaussianFn& g) {
  std::set<EigenLabel> labels;
  const std::size_t n = g.dim();
  for (const auto& [m, c] : g.poly().terms()) {
    MultiIndex j(n);
    while (true) {
      MultiIndex alpha(n), beta(n);
      for (std::size_t i = 0; i < n; ++i) {
        alpha[i] = m.zbar_exp(i) - j[i];
        beta[i] = m.z_exp(i) - j[i];
      }
      labels.emplace(alpha, beta);
      std::size_t i = 0;
      while (i < n && ++j[i] > std::min(m.z_exp(i), m.zbar_exp(i))) j[i++] = 0;
      if (i == n) break;
    }
  }
  return labels;
}

}  // namespace

EigenExpansion expand(const GaussianFn& g) {
  require_unit_width(g);
  EigenExpansion out;
  out.n = g.dim();
  for (const EigenLabel& label : candidate_labels(g)) {
    const Eigenfunction f = build_eigenfunction(label);
    const ExactComplex ip = inner_exact(g, f.fn);
    if (ip.is_zero()) continue;
    const mpq_class norm = mpq_class(label.alpha.factorial() * label.beta.factorial());
    out.entries.emplace_back(label, ip.value * mpq_class(1 / norm));
  }
  return out;
}

GaussianFn project(const GaussianFn& g, int k) {
  require_unit_width(g);
  GaussianFn sum = GaussianFn::zero(g.dim());
  for (const auto& [label, c] : expand(g).entries) {
    if (label.level() == k) sum += build_eigenfunction(label).fn * c;
  }
  return sum;
}

ExactValue kernel_diag_origin(std::size_t n, int k) {
  if (k < 0) throw ValidationError("level must be nonnegative");
  // Each |alpha| = k term |f_{alpha,alpha}(0)|^2 / ||f_{alpha,alpha}||^2 = alpha!^2/(pi^n alpha!^2)
  // contributes pi^{-n}; beta != alpha terms vanish at the origin.
  return ExactValue(mpq_class(binomial(static_cast<long>(n) + k - 1, k)), -static_cast<int>(n));
}

Point TwistedTranslation::shift() const {
  if (a.size() != b.size()) throw ValidationError("translation components differ in length");
  Point w(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) w[j] = {a[j], b[j]};
  return w;
}

Evaluator twisted_translate(const Evaluator& g, const TwistedTranslation& tt) {
  const Point w = tt.shift();
  if (w.size() != g.n) throw ValidationError("translation dimension mismatch");
  Evaluator u;
  u.n = g.n;
  u.decay = g.decay;
  u.degree = g.degree;
  u.center = w;
  if (!g.center.empty()) {
    for (std::size_t j = 0; j < w.size(); ++j) u.center[j] += g.center[j];
  }
  u.fn = [inner = g.fn, w](std::span<const std::complex<double>> z) {
    Point shifted(z.size());
    double phase = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      shifted[j] = z[j] - w[j];
      // a.y - b.x with w = a + ib, z = x + iy
      phase += w[j].real() * z[j].imag() - w[j].imag() * z[j].real();
    }
    return std::polar(1.0, phase) * inner(shifted);
  };
  return u;
}

Evaluator twisted_translate(const GaussianFn& g, const TwistedTranslation& tt) {
  return twisted_translate(make_evaluator(g), tt);
}

}  // namespace twisted
