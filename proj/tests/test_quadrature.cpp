#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "twisted/eigenbasis.hpp"
#include "twisted/errors.hpp"
#include "twisted/moments.hpp"
#include "twisted/quadrature.hpp"

using namespace twisted;

namespace {

GaussianFn mono(std::initializer_list<int> a, std::initializer_list<int> b, long c = 1) {
  return GaussianFn(CPoly::monomial(MultiIndex(a), MultiIndex(b), ComplexRational{c}));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Evaluator radial_fn(std::size_t n, std::function<double(double)> profile) {
  Evaluator u;
  u.n = n;
  u.symmetry = Evaluator::Symmetry::Radial;
  u.radial = profile;
  u.fn = [profile](std::span<const std::complex<double>> z) {
    double r2 = 0.0;
    for (auto zj : z) r2 += std::norm(zj);
    return std::complex<double>(profile(std::sqrt(r2)), 0.0);
  };
  return u;
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2N-1 exactly") {
  for (int count : {1, 2, 5, 12, 33}) {
    const auto& gl = gauss_legendre(count);
    for (int deg = 0; deg <= 2 * count - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("lp_norm_numeric examples") {
  const QuadSpec spec;
  const auto r = lp_norm_numeric(make_evaluator(mono({1}, {0})), 4, Domain::full_space(), spec);
  CHECK(rel(std::pow(r.value, 4), std::numbers::pi / 4) < 1e-8);

  for (std::size_t n = 1; n <= 3; ++n) {
    const auto g = lp_norm_numeric(make_evaluator(GaussianFn::ground_state(n)), 2, Domain::full_space(), spec);
    CHECK(rel(g.value, std::pow(std::numbers::pi, 0.5 * n)) < 1e-8);
  }

  const auto f2 = make_evaluator(build_radial(1, 2));
  REQUIRE(f2.symmetry == Evaluator::Symmetry::Radial);
  const double exact = std::sqrt(radial_closed_forms(1, 2).norm_sq.to_double());
  const auto ball = lp_norm_numeric(f2, 2, Domain::ball({}, 14.0), spec);
  CHECK(rel(ball.value, exact) < 1e-8);
}

TEST_CASE("symmetry detection") {
  CHECK(make_evaluator(build_radial(2, 3)).symmetry == Evaluator::Symmetry::Radial);
  CHECK(make_evaluator(mono({3, 0}, {0, 0})).symmetry == Evaluator::Symmetry::PolyRadial);
  CHECK(make_evaluator(build_eigenfunction(EigenLabel(MultiIndex{1, 0}, MultiIndex{1, 0})).fn).symmetry ==
        Evaluator::Symmetry::PolyRadial);
  CHECK(make_evaluator(mono({1}, {0}) + mono({0}, {1})).symmetry == Evaluator::Symmetry::General);
  // z1 zbar1 alone is poly-radial but not radial in n = 2.
  CHECK(make_evaluator(mono({1, 0}, {1, 0})).symmetry == Evaluator::Symmetry::PolyRadial);
}

TEST_CASE("quadrature agrees with exact even-p norms on random polynomial-Gaussians") {
  std::mt19937_64 rng(424242);
  QuadSpec spec;
  spec.target_rel_err = 1e-9;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial % 5 == 4 ? 2 : 1;
    const GaussianFn g = twisted::testing::random_gaussian(rng, n, n == 1 ? 6 : 4, n == 1 ? 6 : 3);
    const Evaluator u = make_evaluator(g);
    for (int p : {2, 4, 6}) {
      const double exact = std::exp(lp_norm_exact_even(g, p).log() / p);
      const auto q = lp_norm_numeric(u, p, Domain::full_space(), spec);
      CHECK(rel(q.value, exact) < 1e-6);
    }
  }
}

TEST_CASE("quadrature on a random n = 2 degree-6 polynomial-Gaussian") {
  std::mt19937_64 rng(8);
  const GaussianFn g = twisted::testing::random_gaussian(rng, 2, 6, 5);
  for (int p : {2, 4}) {
    const double exact = std::exp(lp_norm_exact_even(g, p).log() / p);
    const auto q = lp_norm_numeric(make_evaluator(g), p, Domain::full_space(), QuadSpec{});
    CHECK(rel(q.value, exact) < 1e-6);
  }
}

TEST_CASE("ball integrals match closed forms, centered and off-center") {
  QuadSpec spec;
  // int_{B_rho(0)} e^{-q r^2/2} in d = 2 equals (2 pi/q)(1 - e^{-q rho^2/2}); here |u|^p with q = p.
  const auto g = make_evaluator(GaussianFn::ground_state(1));
  for (double rho : {0.5, 1.0, 3.0}) {
    const auto r = lp_power_numeric(g, 6, Domain::ball({}, rho), spec);
    CHECK(rel(r.value, 2 * std::numbers::pi / 6 * (1 - std::exp(-3 * rho * rho))) < 1e-9);
  }
  // int_{B_rho(c)} |z|^2 = V_d rho^d |c|^2 + omega_{d-1} rho^{d+2} / (d+2).
  for (std::size_t n = 1; n <= 2; ++n) {
    const int d = static_cast<int>(2 * n);
    Evaluator sq;
    sq.n = n;
    sq.fn = [](std::span<const std::complex<double>> z) {
      double s = 0.0;
      for (auto zj : z) s += std::norm(zj);
      return std::complex<double>(s, 0.0);
    };
    Point c(n);
    c[0] = {0.7, -0.4};
    const double rho = 1.3;
    const double c2 = std::norm(c[0]);
    const double vol = unit_sphere_area(d) / d * std::pow(rho, d);
    const double expected = vol * c2 + unit_sphere_area(d) * std::pow(rho, d + 2) / (d + 2);
    const auto r = integrate_numeric(sq, Domain::ball(c, rho), spec);
    CHECK(rel(r.value.real(), expected) < 1e-9);
  }
}

TEST_CASE("p = 10/3 is stable under resolution doubling") {
  QuadSpec spec;
  spec.target_rel_err = 1e-10;
  for (std::size_t n = 1; n <= 2; ++n) {
    MultiIndex a(n);
    a[0] = 7;
    const auto u = make_evaluator(GaussianFn(CPoly::monomial(a, MultiIndex(n))));
    const auto coarse = lp_norm_numeric(u, 10.0 / 3.0, Domain::full_space(), spec);
    const auto fine = lp_norm_numeric(u, 10.0 / 3.0, Domain::full_space(), spec.doubled());
    CHECK(rel(fine.value, coarse.value) < 1e-6);
  }
}

TEST_CASE("monotone refinement: doubling changes the norm by less than the reported error") {
  std::mt19937_64 rng(17);
  QuadSpec spec;
  spec.target_rel_err = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianFn g = twisted::testing::random_gaussian(rng, 1, 6);
    const auto u = make_evaluator(g);
    const auto r = lp_norm_numeric(u, 3.0, Domain::full_space(), spec);
    QuadSpec finer = spec;
    for (int i = 0; i < r.doublings + 1; ++i) finer = finer.doubled();
    finer.target_rel_err = 1e-12;
    const auto f = lp_norm_numeric(u, 3.0, Domain::full_space(), finer);
    CHECK(rel(f.value, r.value) <= r.rel_err);
  }
}

TEST_CASE("non-convergence is reported, never silent") {
  QuadSpec spec;
  spec.radial_nodes = 1;
  spec.angular_nodes = 1;
  spec.panel_width = 50.0;
  spec.max_doublings = 1;
  spec.target_rel_err = 1e-14;
  const auto u = make_radial_evaluator(RadialProfile(1, 12));
  CHECK_THROWS_AS(lp_norm_numeric(u, 2, Domain::full_space(), spec), ConvergenceError);
}

TEST_CASE("quadrature validation errors") {
  const auto u = make_evaluator(GaussianFn::ground_state(1));
  CHECK_THROWS_AS(lp_norm_numeric(u, 0.5, Domain::full_space(), QuadSpec{}), ValidationError);
  CHECK_THROWS_AS(Domain::ball({}, 0.0), ValidationError);
  QuadSpec bad;
  bad.tail_radius_multiplier = 0.5;
  CHECK_THROWS_AS(lp_norm_numeric(u, 2, Domain::full_space(), bad), ValidationError);
}

TEST_CASE("radial_profile_derivative examples") {
  const auto g = make_evaluator(GaussianFn::ground_state(1));
  CHECK(radial_profile_derivative(g, 1.0) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-7));
  const auto f1 = make_evaluator(build_radial(1, 1));
  CHECK(std::abs(radial_profile_derivative(f1, 0.0)) < 1e-12);
  CHECK_THROWS_AS(radial_profile_derivative(g, -1.0), ValidationError);
}

TEST_CASE("divergence identity for radial eigenfunctions") {
  // omega_{d-1} r^{d-1} d_r f_k(r) = int_{B_r} (|w|^2 - 2(n + 2k)) f_k(w) dw
  QuadSpec spec;
  spec.target_rel_err = 1e-10;
  for (std::size_t n = 1; n <= 2; ++n) {
    const int d = static_cast<int>(2 * n);
    for (int k = 0; k <= 8; ++k) {
      const RadialProfile prof(n, k);
      const auto fk = make_radial_evaluator(prof);
      const double mu = static_cast<double>(n) + 2.0 * k;
      const auto source = radial_fn(n, [prof, mu](double r) { return (r * r - 2.0 * mu) * prof(r); });
      for (double r : {0.25, 0.5, 1.0}) {
        const double lhs = unit_sphere_area(d) * std::pow(r, d - 1) * radial_profile_derivative(fk, r);
        const double rhs = integrate_numeric(source, Domain::ball({}, r), spec).value.real();
        CHECK(std::abs(lhs - rhs) <= 1e-4 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("half-height ball: f_k >= f_k(0)/2 within c / sqrt(n + 2k)") {
  for (std::size_t n = 1; n <= 2; ++n) {
    for (int k = 0; k <= 64; ++k) {
      const RadialProfile prof(n, k);
      const double rk = kHalfHeightConstant / std::sqrt(static_cast<double>(n) + 2.0 * k);
      for (int i = 0; i <= 200; ++i) REQUIRE(prof(rk * i / 200.0) >= 0.5);
    }
  }
}
