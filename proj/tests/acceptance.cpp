// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "test_support.hpp"
#include "twisted/asymptotics.hpp"
#include "twisted/eigenbasis.hpp"
#include "twisted/errors.hpp"
#include "twisted/moments.hpp"
#include "twisted/opnorm.hpp"
#include "twisted/projection.hpp"
#include "twisted/quadrature.hpp"

using namespace twisted;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

mpz_class factorial(long k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
  return f;
}

mpz_class binomial(long n, long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

GaussianFn z1_power(std::size_t n, int k) {
  MultiIndex a(n);
  a[0] = k;
  return GaussianFn(CPoly::monomial(a, MultiIndex(n)));
}

// (2 pi / p)^n (2/p)^{kp/2} (kp/2)!
ExactValue gamma_formula(std::size_t n, int k, int p) {
  mpq_class base(2, p);
  mpq_class r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= base;
  for (int i = 0; i < k * p / 2; ++i) r *= base;
  r *= factorial(k * p / 2);
  return ExactValue(r, static_cast<int>(n));
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<EigenLabel> labels_up_to(std::size_t n, int max_order) {
  std::vector<MultiIndex> idx;
  for (int s = 0; s <= max_order; ++s) {
    for (auto& m : compositions(n, s)) idx.push_back(m);
  }
  std::vector<EigenLabel> out;
  for (const auto& a : idx) {
    for (const auto& b : idx) out.emplace_back(a, b);
  }
  return out;
}

int hw_threads() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

Outcome c1_gamma_exact() {
  int count = 0;
  for (std::size_t n : {1, 2}) {
    for (int k = 0; k <= 15; ++k) {
      for (int p : {2, 4, 6}) {
        if (!(lp_norm_exact_even(z1_power(n, k), p) == gamma_formula(n, k, p))) {
          return {false, "mismatch at d=" + std::to_string(2 * n) + " k=" + std::to_string(k) + " p=" + std::to_string(p)};
        }
        ++count;
      }
    }
  }
  return {true, std::to_string(count) + " exact equalities"};
}

Outcome c2_quadrature() {
  double worst = 0;
  for (std::size_t n : {1, 2}) {
    for (int k = 0; k <= 15; ++k) {
      const Evaluator u = make_evaluator(z1_power(n, k));
      for (int p : {2, 4, 6}) {
        const double exact = gamma_formula(n, k, p).to_double();
        const double q = lp_power_numeric(u, p, Domain::full_space(), QuadSpec{}).value;
        worst = std::max(worst, std::abs(q - exact) / exact);
      }
    }
  }
  double worst_crit = 0;
  QuadSpec s;
  s.target_rel_err = 1e-9;
  for (int k = 0; k <= 15; ++k) {
    const Evaluator u = make_evaluator(z1_power(2, k));
    const double a = lp_power_numeric(u, 10.0 / 3, Domain::full_space(), s).value;
    const double b = lp_power_numeric(u, 10.0 / 3, Domain::full_space(), s.doubled()).value;
    worst_crit = std::max(worst_crit, std::abs(a - b) / b);
  }
  return {worst < 1e-6 && worst_crit < 1e-6,
          fmt("max rel err %.2e, p=10/3 vs doubled %.2e", worst, worst_crit)};
}

Outcome c3_l2_norms() {
  long diag = 0, offdiag = 0, by_charge = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto labels = labels_up_to(n, 5);
    // every term of f_{alpha,beta} has z-degree minus zbar-degree equal to beta - alpha per coordinate
    std::map<std::vector<int>, std::vector<std::size_t>> buckets;
    std::vector<Eigenfunction> fs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      fs.push_back(build_eigenfunction(labels[i]));
      std::vector<int> charge(n);
      for (std::size_t j = 0; j < n; ++j) charge[j] = labels[i].beta[j] - labels[i].alpha[j];
      for (const auto& [m, c] : fs.back().fn.poly().terms()) {
        for (std::size_t j = 0; j < n; ++j) {
          if (m.z_exp(j) - m.zbar_exp(j) != charge[j]) return {false, "term outside its charge class"};
        }
      }
      buckets[charge].push_back(i);
    }
    // distinct charges are orthogonal by the moment selection rule; inside a class compute exactly
    const std::size_t total = labels.size() * (labels.size() - 1) / 2;
    long same = 0;
    for (const auto& [charge, members] : buckets) {
      for (std::size_t x = 0; x < members.size(); ++x) {
        const auto& fi = fs[members[x]];
        if (!(inner_exact(fi.fn, fi.fn).real() == exact_l2_norm_sq(fi.label))) return {false, "norm mismatch"};
        const ExactValue formula(mpq_class(fi.label.alpha.factorial() * fi.label.beta.factorial()), static_cast<int>(n));
        if (!(exact_l2_norm_sq(fi.label) == formula)) return {false, "closed form mismatch"};
        ++diag;
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          if (!inner_exact(fi.fn, fs[members[y]].fn).is_zero()) return {false, "nonzero off-diagonal inner product"};
          ++same;
        }
      }
    }
    offdiag += same;
    by_charge += static_cast<long>(total) - same;
  }
  return {true, std::to_string(diag) + " norms, " + std::to_string(offdiag) + " computed zeros, " +
                    std::to_string(by_charge) + " zeros by charge"};
}

Outcome c4_eigen_identity() {
  long count = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& l : labels_up_to(n, 5)) {
      const Eigenfunction f = build_eigenfunction(l);
      const long mu = static_cast<long>(n) + 2 * l.alpha.order();
      if (!(apply_L(f.fn) == f.fn * ComplexRational{mu})) return {false, "eigen-identity fails"};
      ++count;
    }
  }
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 3;
    const GaussianFn g = testing::random_gaussian(rng, n, 6);
    for (std::size_t j = 1; j <= n; ++j) {
      const GaussianFn c = ladder_lower(ladder_adjoint(g, j), j) - ladder_adjoint(ladder_lower(g, j), j);
      if (!(c == g * ComplexRational{4})) return {false, "commutator fails"};
    }
  }
  return {true, std::to_string(count) + " eigenfunctions, 200 commutators"};
}

Outcome c5_radial() {
  double worst_eval = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int k = 0; k <= 10; ++k) {
      const GaussianFn f = build_radial(n, k);
      const mpz_class b = binomial(static_cast<long>(n) + k - 1, k);
      const mpz_class kf = factorial(k);
      mpq_class four_k(1);
      four_k /= mpz_class(1) << (2 * k);
      const mpq_class at0 = four_k * kf * b;
      const ExactValue norm(four_k * four_k * kf * kf * b, static_cast<int>(n));
      if (!(f.poly().coeff(Monomial(n)).re == at0) || f.poly().coeff(Monomial(n)).im != 0) {
        return {false, "value at origin"};
      }
      const double ev = f.evaluate(Point(n, {0.0, 0.0})).real();
      worst_eval = std::max(worst_eval, std::abs(ev - at0.get_d()) / at0.get_d());
      if (!(inner_exact(f, f).real() == norm)) return {false, "norm"};
      const auto cf = radial_closed_forms(n, k);
      if (!(cf.value_at_zero == ExactValue(at0)) || !(cf.norm_sq == norm)) return {false, "closed forms"};
    }
  }
  return {worst_eval < 1e-14, fmt("exact; evaluate() rel err %.1e", worst_eval)};
}

Outcome c6_two_to_infty() {
  std::string d;
  bool ok = true;
  for (std::size_t n : {1, 2, 3}) {
    SweepOptions o;
    o.candidate = Candidate::TwoToInfty;
    o.n = n;
    o.k_min = 16;
    o.k_max = 4096;
    o.regressor = Regressor::LogLambda;
    const FitResult f = sweep_fit(o);
    const double target = (2.0 * n - 2) / 2;
    ok = ok && std::abs(f.slope - target) < 0.02;
    d += fmt("d=%g slope %.4f ", 2.0 * n, f.slope);
  }
  return {ok, d};
}

Outcome c7_zbar() {
  std::string d;
  bool ok = true;
  for (double p : {4.0, 6.0, 10.0 / 3}) {
    SweepOptions o;
    o.candidate = Candidate::Zbar;
    o.p = p;
    o.k_min = 100;
    o.k_max = 10000;
    const FitResult f = sweep_fit(o);
    const double target = 0.5 * (1 / p - 0.5);
    ok = ok && std::abs(f.slope - target) < 0.01;
    d += fmt("p=%.3g slope %.4f ", p, f.slope);
  }
  return {ok, d};
}

Outcome c8_radial_slope() {
  std::string d;
  bool ok = true;
  for (std::size_t n : {1, 2}) {
    for (double p : {8.0, 16.0}) {
      SweepOptions o;
      o.candidate = Candidate::Radial;
      o.n = n;
      o.p = p;
      o.k_min = 1;
      o.k_max = 100;
      o.threads = hw_threads();
      // the law is a power of lambda^2 = n + 2k; against log k the shift by n biases small k
      o.regressor = Regressor::LogLambda;
      const FitResult f = sweep_fit(o);
      const double slope = f.slope / 2;
      const double dd = 2.0 * n;
      const double target = -dd / (2 * p) + (dd - 2) / 4;
      bool rows = true;
      for (const auto& r : f.rows) rows = rows && r.ok;
      ok = ok && rows && std::abs(slope - target) < 0.05;
      d += fmt("d=%g,", dd) + fmt("p=%g: %.4f ", p, slope);
    }
  }
  return {ok, d};
}

Outcome c9_projection() {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 2;
    const GaussianFn g = testing::random_gaussian(rng, n, 8);
    const GaussianFn h = testing::random_gaussian(rng, n, 8);
    GaussianFn sum = GaussianFn::zero(n);
    mpq_class parseval = 0;
    for (int k = 0; k <= std::max(0, g.degree()); ++k) {
      const GaussianFn pk = project(g, k);
      if (!(project(pk, k) == pk)) return {false, "idempotence"};
      if (!(inner_exact(pk, h) == inner_exact(g, project(h, k)))) return {false, "self-adjointness"};
      parseval += inner_exact(pk, pk).real().rational();
      sum += pk;
    }
    if (!(sum == g)) return {false, "completeness"};
    const ExactValue total = inner_exact(g, g).real();
    if (!(total == ExactValue(parseval, static_cast<int>(n))) && !(total.rational() == 0 && parseval == 0)) {
      return {false, "Parseval"};
    }
    if (!(expand(g).l2_norm_sq() == total)) return {false, "Parseval via expansion"};
  }
  return {true, "100 random polynomial-Gaussians, degree <= 8"};
}

Outcome c10_dispersive() {
  DispersiveOptions o;
  o.ks = {4, 8, 16, 32, 64};
  o.threads = hw_threads();
  const DispersiveResult r = dispersive_check(o);
  bool rows = true;
  for (const auto& row : r.rows) rows = rows && row.ok;
  return {rows && r.log_sup_slope < 0.05, fmt("empirical constant %.4f, log-sup slope %.4f", r.sup, r.log_sup_slope)};
}

Outcome c11_heisenberg() {
  std::mt19937_64 rng(11);
  const std::vector<GaussianFn> gs = {build_eigenfunction(EigenLabel(MultiIndex{2}, MultiIndex{1})).fn,
                                      build_eigenfunction(EigenLabel(MultiIndex{1, 0}, MultiIndex{2, 1})).fn,
                                      build_radial(2, 3), build_radial(1, 4), testing::random_gaussian(rng, 2, 4, 4)};
  int count = 0;
  for (const auto& g : gs) {
    for (const auto& row : heisenberg_check(g, {4, 9}, {4, 6})) {
      if (!row.equal) return {false, "dilation law fails"};
      const double sigma = theory_exponents(static_cast<int>(2 * g.dim()), row.p).sigma;
      if (std::abs(row.expected.to_double() / std::pow(double(row.m), row.p * sigma) - 1) > 1e-12) {
        return {false, "exponent mismatch"};
      }
      ++count;
    }
  }
  return {true, std::to_string(count) + " exact equalities"};
}

Outcome c12_power() {
  double worst = 0;
  bool ok = true;
  for (auto [k, p] : std::vector<std::pair<int, double>>{{3, 6.0}, {4, 4.0}, {6, 8.0}}) {
    PowerIterationOptions o;
    o.B = 0;
    const NormEstimate b0 = norm_2_to_p_lower_power(1, k, p, o);
    const NormEstimate z = candidate_ratio_zbar(1, k, p);
    const double rel = std::abs(std::expm1(b0.value_log - z.value_log));
    worst = std::max(worst, rel);
    o.B = 2;
    const NormEstimate b2 = norm_2_to_p_lower_power(1, k, p, o);
    for (std::size_t i = 1; i < b2.objective_trace.size(); ++i) {
      ok = ok && b2.objective_trace[i] >= b2.objective_trace[i - 1];
    }
    ok = ok && rel < 1e-6 && b2.value_log >= b0.value_log - o.tol;
  }
  return {ok, fmt("B=0 vs zbar max rel diff %.1e", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact Gamma formula", 1, c1_gamma_exact},
      {2, "quadrature oracle", 60, c2_quadrature},
      {3, "L2 norms and orthogonality", 60, c3_l2_norms},
      {4, "eigen-identity and [D,D*] = 4", 60, c4_eigen_identity},
      {5, "radial closed forms", 60, c5_radial},
      {6, "2->inf exponent", 1, c6_two_to_infty},
      {7, "zbar candidate exponent", 1, c7_zbar},
      {8, "radial candidate exponent", 300, c8_radial_slope},
      {9, "projection algebra", 60, c9_projection},
      {10, "dispersive boundedness", 600, c10_dispersive},
      {11, "Heisenberg scaling", 1, c11_heisenberg},
      {12, "power-iteration consistency", 300, c12_power},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.ok = false;
      o.detail += fmt(" [over budget %.0f s]", c.budget_s);
    }
    if (!o.ok) ++failed;
    std::printf("%s %2d %-32s %8.2fs  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
