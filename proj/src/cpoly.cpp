#include "twisted/cpoly.hpp"

#include <algorithm>

#include "twisted/errors.hpp"

namespace twisted {

Monomial::Monomial(const MultiIndex& a, const MultiIndex& b) : exps_(2 * a.size()) {
  if (a.size() != b.size()) throw ValidationError("monomial exponent lengths differ");
  std::copy(a.entries().begin(), a.entries().end(), exps_.begin());
  std::copy(b.entries().begin(), b.entries().end(), exps_.begin() + static_cast<long>(a.size()));
}

MultiIndex Monomial::z_part() const {
  return MultiIndex(std::vector<int>(exps_.begin(), exps_.begin() + static_cast<long>(dim())));
}

MultiIndex Monomial::zbar_part() const {
  return MultiIndex(std::vector<int>(exps_.begin() + static_cast<long>(dim()), exps_.end()));
}

int Monomial::degree() const noexcept {
  int d = 0;
  for (int e : exps_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += o.exps_[i];
  return out;
}

Monomial Monomial::conj() const {
  Monomial out(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    out.z_exp(j) = zbar_exp(j);
    out.zbar_exp(j) = z_exp(j);
  }
  return out;
}

bool GradedLex::operator()(const Monomial& x, const Monomial& y) const {
  const int dx = x.degree();
  const int dy = y.degree();
  if (dx != dy) return dx < dy;
  return std::lexicographical_compare(x.raw().begin(), x.raw().end(), y.raw().begin(), y.raw().end());
}

CPoly CPoly::constant(std::size_t n, const ComplexRational& c) {
  CPoly p(n);
  p.add_term(Monomial(n), c);
  return p;
}

CPoly CPoly::monomial(const MultiIndex& a, const MultiIndex& b, const ComplexRational& c) {
  CPoly p(a.size());
  p.add_term(Monomial(a, b), c);
  return p;
}

CPoly CPoly::z(std::size_t n, std::size_t j) {
  Monomial m(n);
  m.z_exp(j) = 1;
  CPoly p(n);
  p.add_term(m, ComplexRational{1});
  return p;
}

CPoly CPoly::zbar(std::size_t n, std::size_t j) {
  Monomial m(n);
  m.zbar_exp(j) = 1;
  CPoly p(n);
  p.add_term(m, ComplexRational{1});
  return p;
}

int CPoly::degree() const {
  // Graded order: the last key has the largest degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

ComplexRational CPoly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? ComplexRational{} : it->second;
}

void CPoly::add_term(const Monomial& m, const ComplexRational& c) {
  if (m.dim() != n_) throw ValidationError("monomial dimension does not match polynomial");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

CPoly& CPoly::operator+=(const CPoly& o) {
  if (o.n_ != n_) throw ValidationError("polynomial dimension mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
  if (o.n_ != n_) throw ValidationError("polynomial dimension mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

CPoly& CPoly::operator*=(const ComplexRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

CPoly operator*(const CPoly& a, const CPoly& b) {
  if (a.n_ != b.n_) throw ValidationError("polynomial dimension mismatch");
  CPoly out(a.n_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

CPoly CPoly::conj() const {
  CPoly out(n_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m.conj(), c.conj());
  return out;
}

CPoly CPoly::d_z(std::size_t j) const {
  CPoly out(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m.z_exp(j);
    if (e == 0) continue;
    Monomial dm = m;
    dm.z_exp(j) = e - 1;
    out.add_term(dm, c * mpq_class(e));
  }
  return out;
}

CPoly CPoly::d_zbar(std::size_t j) const {
  CPoly out(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m.zbar_exp(j);
    if (e == 0) continue;
    Monomial dm = m;
    dm.zbar_exp(j) = e - 1;
    out.add_term(dm, c * mpq_class(e));
  }
  return out;
}

CPoly CPoly::times_z(std::size_t j) const {
  CPoly out(n_);
  for (const auto& [m, c] : terms_) {
    Monomial mm = m;
    ++mm.z_exp(j);
    out.terms_.emplace(std::move(mm), c);
  }
  return out;
}

CPoly CPoly::times_zbar(std::size_t j) const {
  CPoly out(n_);
  for (const auto& [m, c] : terms_) {
    Monomial mm = m;
    ++mm.zbar_exp(j);
    out.terms_.emplace(std::move(mm), c);
  }
  return out;
}

std::complex<double> CPoly::evaluate(std::span<const std::complex<double>> z) const {
  if (z.size() != n_) throw ValidationError("evaluation point has wrong dimension");
  if (terms_.empty()) return {0.0, 0.0};
  int max_exp = 0;
  for (const auto& [m, c] : terms_) {
    for (int e : m.raw()) max_exp = std::max(max_exp, e);
  }
  // powers[j][e] = z_j^e, cpowers[j][e] = conj(z_j)^e
  std::vector<std::vector<std::complex<double>>> powers(n_), cpowers(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    powers[j].resize(static_cast<std::size_t>(max_exp) + 1);
    cpowers[j].resize(static_cast<std::size_t>(max_exp) + 1);
    powers[j][0] = cpowers[j][0] = 1.0;
    for (int e = 1; e <= max_exp; ++e) {
      powers[j][e] = powers[j][e - 1] * z[j];
      cpowers[j][e] = cpowers[j][e - 1] * std::conj(z[j]);
    }
  }
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [m, c] : terms_) {
    std::complex<double> term = c.to_complex();
    for (std::size_t j = 0; j < n_; ++j) term *= powers[j][m.z_exp(j)] * cpowers[j][m.zbar_exp(j)];
    sum += term;
  }
  return sum;
}

}  // namespace twisted
