#include "twisted/gaussian_fn.hpp"

#include <cmath>

#include "twisted/errors.hpp"

namespace twisted {

GaussianFn::GaussianFn(CPoly poly, mpq_class width) : poly_(std::move(poly)), width_(std::move(width)) {
  if (sgn(width_) <= 0) throw ValidationError("Gaussian width must be positive");
  if (poly_.dim() == 0) throw ValidationError("dimension must be positive");
}

GaussianFn GaussianFn::ground_state(std::size_t n) {
  return GaussianFn(CPoly::constant(n, ComplexRational{1}));
}

GaussianFn GaussianFn::zero(std::size_t n, mpq_class width) {
  return GaussianFn(CPoly(n), std::move(width));
}

namespace {

void require_same_class(const GaussianFn& a, const GaussianFn& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  if (a.width() != b.width()) throw ValidationError("width mismatch");
}

void require_unit_width(const GaussianFn& g) {
  if (g.width() != 1) throw ValidationError("ladder algebra requires width t = 1");
}

std::size_t coordinate(const GaussianFn& g, std::size_t j) {
  if (j < 1 || j > g.dim()) throw ValidationError("coordinate index out of range");
  return j - 1;
}

}  // namespace

GaussianFn& GaussianFn::operator+=(const GaussianFn& o) {
  require_same_class(*this, o);
  poly_ += o.poly_;
  return *this;
}

GaussianFn& GaussianFn::operator-=(const GaussianFn& o) {
  require_same_class(*this, o);
  poly_ -= o.poly_;
  return *this;
}

GaussianFn& GaussianFn::operator*=(const ComplexRational& c) {
  poly_ *= c;
  return *this;
}

std::complex<double> GaussianFn::evaluate(std::span<const std::complex<double>> z) const {
  double r2 = 0.0;
  for (const auto& zj : z) r2 += std::norm(zj);
  return poly_.evaluate(z) * std::exp(-0.5 * width_.get_d() * r2);
}

GaussianFn d_z(const GaussianFn& g, std::size_t j) {
  // d_z (p e^{-t z zbar/2}) = (d_z p - (t/2) zbar p) e^{...}
  const std::size_t c = coordinate(g, j);
  CPoly p = g.poly().d_z(c);
  p -= g.poly().times_zbar(c) * ComplexRational(mpq_class(g.width() / 2));
  return GaussianFn(std::move(p), g.width());
}

GaussianFn d_zbar(const GaussianFn& g, std::size_t j) {
  const std::size_t c = coordinate(g, j);
  CPoly p = g.poly().d_zbar(c);
  p -= g.poly().times_z(c) * ComplexRational(mpq_class(g.width() / 2));
  return GaussianFn(std::move(p), g.width());
}

GaussianFn ladder_raise(const GaussianFn& g, std::size_t j) {
  require_unit_width(g);
  const std::size_t c = coordinate(g, j);
  CPoly p = g.poly().d_z(c);
  p -= g.poly().times_zbar(c);
  return GaussianFn(std::move(p));
}

GaussianFn ladder_lower(const GaussianFn& g, std::size_t j) {
  require_unit_width(g);
  const std::size_t c = coordinate(g, j);
  return GaussianFn(g.poly().d_zbar(c) * ComplexRational{2});
}

GaussianFn ladder_adjoint(const GaussianFn& g, std::size_t j) {
  return ladder_raise(g, j) * ComplexRational{-2};
}

GaussianFn apply_L(const GaussianFn& g) {
  require_unit_width(g);
  const std::size_t n = g.dim();
  CPoly out = g.poly() * ComplexRational{static_cast<long>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const CPoly dzb = g.poly().d_zbar(j);
    out += dzb.times_zbar(j) * ComplexRational{2};
    out -= dzb.d_z(j) * ComplexRational{2};
  }
  return GaussianFn(std::move(out));
}

GaussianFn euclidean_laplacian(const GaussianFn& g) {
  GaussianFn out = GaussianFn::zero(g.dim(), g.width());
  for (std::size_t j = 1; j <= g.dim(); ++j) out += d_z(d_zbar(g, j), j);
  return out * ComplexRational{4};
}

}  // namespace twisted
