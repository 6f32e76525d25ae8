#include "twisted/evaluator.hpp"

#include <cmath>
#include <algorithm>
#include <map>

#include "twisted/errors.hpp"

namespace twisted {

double Evaluator::center_norm() const {
  double s = 0.0;
  for (const auto& c : center) s += std::norm(c);
  return std::sqrt(s);
}

bool is_poly_radial(const GaussianFn& g) {
  const auto& terms = g.poly().terms();
  if (terms.empty()) return true;
  const Monomial& first = terms.begin()->first;
  for (const auto& [m, c] : terms) {
    for (std::size_t j = 0; j < g.dim(); ++j) {
      if (m.z_exp(j) - m.zbar_exp(j) != first.z_exp(j) - first.zbar_exp(j)) return false;
    }
  }
  return true;
}

bool is_radial(const GaussianFn& g) {
  // p must be sum_m C_m (|z|^2)^m, i.e. coefficient of prod (z_j zbar_j)^{a_j} equals
  // C_{|a|} * multinomial(a).
  std::map<int, ComplexRational> by_order;
  for (const auto& [m, c] : g.poly().terms()) {
    const MultiIndex a = m.z_part();
    if (a != m.zbar_part()) return false;
    const ComplexRational scaled = c * mpq_class(mpz_class(1), multinomial(a));
    auto [it, inserted] = by_order.try_emplace(a.order(), scaled);
    if (!inserted && !(it->second == scaled)) return false;
  }
  // Every monomial of each present order must be present.
  for (const auto& [order, c] : by_order) {
    if (compositions(g.dim(), order).size() !=
        static_cast<std::size_t>(std::count_if(g.poly().terms().begin(), g.poly().terms().end(),
                                                [order](const auto& t) { return t.first.degree() == 2 * order; }))) {
      return false;
    }
  }
  return true;
}

namespace {

// Double-precision copy of a GaussianFn; exact evaluation through mpq is far too slow for
// quadrature.
struct CompiledFn {
  std::size_t n = 0;
  int max_exp = 0;
  double half_t = 0.5;
  std::vector<std::complex<double>> coeffs;
  std::vector<int> exps;  // 2n per term: z exponents then zbar exponents

  explicit CompiledFn(const GaussianFn& g) : n(g.dim()), half_t(0.5 * g.width().get_d()) {
    for (const auto& [m, c] : g.poly().terms()) {
      coeffs.push_back(c.to_complex());
      for (int e : m.raw()) {
        exps.push_back(e);
        max_exp = std::max(max_exp, e);
      }
    }
  }

  std::complex<double> operator()(std::span<const std::complex<double>> z) const {
    if (z.size() != n) throw ValidationError("evaluation point has wrong dimension");
    const std::size_t stride = static_cast<std::size_t>(max_exp) + 1;
    thread_local std::vector<std::complex<double>> pw;
    pw.resize(2 * n * stride);
    double r2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      r2 += std::norm(z[j]);
      auto* a = &pw[j * stride];
      auto* b = &pw[(n + j) * stride];
      a[0] = b[0] = 1.0;
      for (std::size_t e = 1; e < stride; ++e) {
        a[e] = a[e - 1] * z[j];
        b[e] = b[e - 1] * std::conj(z[j]);
      }
    }
    std::complex<double> sum{0.0, 0.0};
    const int* e = exps.data();
    for (const auto& c : coeffs) {
      std::complex<double> term = c;
      for (std::size_t i = 0; i < 2 * n; ++i) term *= pw[i * stride + static_cast<std::size_t>(e[i])];
      sum += term;
      e += 2 * n;
    }
    return sum * std::exp(-half_t * r2);
  }
};

}  // namespace

Evaluator make_evaluator(const GaussianFn& g) {
  Evaluator u;
  u.n = g.dim();
  u.decay = g.width().get_d();
  u.degree = std::max(0, g.degree());
  u.fn = CompiledFn(g);
  if (is_radial(g)) {
    u.symmetry = Evaluator::Symmetry::Radial;
    const std::size_t n = g.dim();
    u.radial = [f = CompiledFn(g), n](double r) {
      Point z(n, {0.0, 0.0});
      z[0] = r;
      return f(z).real();
    };
  } else if (is_poly_radial(g)) {
    u.symmetry = Evaluator::Symmetry::PolyRadial;
  }
  return u;
}

Evaluator make_radial_evaluator(const RadialProfile& profile) {
  Evaluator u;
  u.n = profile.dim();
  u.symmetry = Evaluator::Symmetry::Radial;
  u.radial = [profile](double r) { return profile(r); };
  u.fn = [profile](std::span<const std::complex<double>> z) {
    double r2 = 0.0;
    for (const auto& zj : z) r2 += std::norm(zj);
    return std::complex<double>(profile(std::sqrt(r2)), 0.0);
  };
  u.decay = 1.0;
  u.degree = 2.0 * profile.level();
  return u;
}

Evaluator make_eigen_combination(std::vector<EigenLabel> labels, std::vector<std::complex<double>> coeffs) {
  if (labels.empty()) throw ValidationError("empty eigenfunction combination");
  if (labels.size() != coeffs.size()) throw ValidationError("label/coefficient count mismatch");
  Evaluator u;
  u.n = labels.front().dim();
  int degree = 0;
  for (const auto& l : labels) {
    if (l.dim() != u.n) throw ValidationError("mixed dimensions in eigenfunction combination");
    degree = std::max(degree, l.alpha.order() + l.beta.order());
  }
  u.degree = degree;
  u.fn = [labels = std::move(labels), coeffs = std::move(coeffs)](std::span<const std::complex<double>> z) {
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i = 0; i < labels.size(); ++i) sum += coeffs[i] * normalized_eigen_value(labels[i], z);
    return sum;
  };
  return u;
}

}  // namespace twisted
