#include "twisted/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "twisted/eigenbasis.hpp"
#include "twisted/errors.hpp"
#include "twisted/moments.hpp"

namespace twisted {

ExponentTheory theory_exponents(int d, double p) {
  if (d < 2 || d % 2 != 0) throw ValidationError("dimension d must be even and >= 2");
  if (!(p >= 2.0)) throw ValidationError("p must lie in [2, infinity]");
  ExponentTheory t;
  t.d = d;
  t.p = p;
  const double dd = d;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  t.p_critical = 2.0 * (dd + 1.0) / (dd - 1.0);
  t.rho = p <= t.p_critical ? inv_p - 0.5 : (dd - 2.0) / 2.0 - dd * inv_p;
  t.sigma = 0.5 * dd * (0.5 - inv_p);
  return t;
}

std::string to_string(Candidate c) {
  switch (c) {
    case Candidate::Zbar:
      return "zbar";
    case Candidate::Radial:
      return "radial";
    case Candidate::TwoToInfty:
      return "twoinfty";
    case Candidate::PowerIteration:
      return "power";
  }
  return "zbar";
}

Candidate candidate_from_string(const std::string& s) {
  if (s == "zbar") return Candidate::Zbar;
  if (s == "radial") return Candidate::Radial;
  if (s == "twoinfty") return Candidate::TwoToInfty;
  if (s == "power") return Candidate::PowerIteration;
  throw ValidationError("unknown candidate '" + s + "' (zbar, radial, twoinfty, power)");
}

std::string to_string(Regressor r) { return r == Regressor::LogK ? "log-k" : "log-lambda"; }

Regressor regressor_from_string(const std::string& s) {
  if (s == "log-k") return Regressor::LogK;
  if (s == "log-lambda") return Regressor::LogLambda;
  throw ValidationError("unknown regressor '" + s + "' (log-k, log-lambda)");
}

double FitResult::regressor_value(const SweepRow& row) const {
  return regressor == Regressor::LogK ? std::log(static_cast<double>(row.k)) : std::log(row.lambda);
}

std::vector<int> dyadic_levels(int k_min, int k_max) {
  if (k_min < 0 || k_max < k_min) throw ValidationError("invalid k range");
  std::vector<int> ks;
  for (long k = 1; k <= k_max; k *= 2) {
    if (k >= k_min) ks.push_back(static_cast<int>(k));
  }
  if (ks.empty()) throw ValidationError("k range contains no power of two");
  return ks;
}

FitResult fit_rows(std::vector<SweepRow> rows, Regressor regressor) {
  FitResult fit;
  fit.regressor = regressor;
  fit.rows = std::move(rows);
  std::vector<double> x, y;
  for (const auto& r : fit.rows) {
    if (!r.ok) continue;
    if (regressor == Regressor::LogK && r.k <= 0) throw ValidationError("log-k regressor needs k >= 1");
    x.push_back(fit.regressor_value(r));
    y.push_back(r.value_log());
  }
  if (x.size() < 2) throw ValidationError("a fit needs at least two usable rows");
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("regressor is constant over the rows");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

namespace {

// Runs job(i) for i < count on up to `threads` workers. Results go to caller-owned slots, so
// the outcome does not depend on scheduling.
template <class Job>
void parallel_for(std::size_t count, int threads, Job&& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

NormEstimate evaluate_candidate(const SweepOptions& opts, int k) {
  switch (opts.candidate) {
    case Candidate::Zbar:
      return candidate_ratio_zbar(opts.n, k, opts.p);
    case Candidate::Radial:
      return candidate_ratio_radial(opts.n, k, opts.p, opts.spec);
    case Candidate::TwoToInfty:
      return norm_2_to_infty(opts.n, k);
    case Candidate::PowerIteration:
      return norm_2_to_p_lower_power(opts.n, k, opts.p, opts.power);
  }
  throw ValidationError("unknown candidate");
}

}  // namespace

FitResult sweep_fit(const SweepOptions& opts) {
  if (opts.n < 1) throw ValidationError("dimension n must be >= 1");
  if (opts.threads < 1) throw ValidationError("threads must be >= 1");
  const std::vector<int> ks = dyadic_levels(opts.k_min, opts.k_max);
  std::vector<SweepRow> rows(ks.size());
  parallel_for(ks.size(), opts.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.k = ks[i];
    row.lambda = std::sqrt(static_cast<double>(opts.n) + 2.0 * ks[i]);
    try {
      row.estimate = evaluate_candidate(opts, ks[i]);
    } catch (const ConvergenceError& e) {
      row.ok = false;
      row.error = e.what();
      row.estimate.value_log = e.last_value();
    }
  });
  return fit_rows(std::move(rows), opts.regressor);
}

namespace {

struct FamilyMember {
  std::string name;
  Evaluator u;
};

std::vector<FamilyMember> dispersive_family(std::size_t n, int k, std::uint64_t seed) {
  std::vector<FamilyMember> out;
  out.push_back({"radial", make_radial_evaluator(RadialProfile(n, k))});
  MultiIndex a(n);
  a[0] = k;
  out.push_back({"zbar", make_eigen_combination({EigenLabel(a, MultiIndex(n))}, {1.0})});
  const std::vector<EigenLabel> labels = enumerate_labels(n, k, 2);
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
  std::normal_distribution<double> gauss;
  for (int r = 0; r < 3; ++r) {
    std::vector<std::complex<double>> c(labels.size());
    double s = 0.0;
    for (auto& x : c) {
      x = {gauss(rng), gauss(rng)};
      s += std::norm(x);
    }
    for (auto& x : c) x /= std::sqrt(s);
    out.push_back({"random" + std::to_string(r), make_eigen_combination(labels, c)});
  }
  return out;
}

}  // namespace

DispersiveResult dispersive_check(const DispersiveOptions& opts) {
  if (opts.n < 1) throw ValidationError("dimension n must be >= 1");
  if (opts.ks.empty()) throw ValidationError("no levels given");
  if (!(opts.outer_factor > 0.0)) throw ValidationError("outer factor must be positive");
  if (opts.threads < 1) throw ValidationError("threads must be >= 1");
  opts.spec.validate();
  const int d = static_cast<int>(2 * opts.n);
  const double p_c = theory_exponents(d, 2.0).p_critical;

  struct Task {
    int k;
    std::size_t member;
    Point center;
  };
  std::vector<Task> tasks;
  for (int k : opts.ks) {
    if (k < 0) throw ValidationError("level k must be nonnegative");
    const double lambda = std::sqrt(static_cast<double>(opts.n) + 2.0 * k);
    std::vector<Point> centers = opts.centers;
    if (centers.empty()) {
      for (std::complex<double> c0 : {std::complex<double>(0.0, 0.0), std::complex<double>(lambda, 0.0),
                                      std::polar(lambda, std::numbers::pi / 3.0)}) {
        Point c(opts.n, {0.0, 0.0});
        c[0] = c0;
        centers.push_back(c);
      }
    }
    for (const Point& c : centers) {
      if (c.size() != opts.n) throw ValidationError("center has wrong dimension");
      for (std::size_t m = 0; m < 5; ++m) tasks.push_back({k, m, c});
    }
  }

  DispersiveResult result;
  result.rows.resize(tasks.size());
  parallel_for(tasks.size(), opts.threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    const double mu = static_cast<double>(opts.n) + 2.0 * t.k;
    const double lambda = std::sqrt(mu);
    const FamilyMember member = std::move(dispersive_family(opts.n, t.k, opts.seed)[t.member]);
    DispersiveRow& row = result.rows[i];
    row.family = member.name;
    row.k = t.k;
    row.center = t.center;
    row.lambda = lambda;
    // Oscillations have wavelength ~ 1/lambda radially and the circle of radius ~ lambda
    // carries ~ mu of them.
    QuadSpec s = opts.spec;
    s.panel_width = std::min(s.panel_width, 4.0 / lambda);
    s.angular_nodes = std::max(s.angular_nodes, static_cast<int>(std::ceil(8.0 * mu)));
    try {
      const double num = lp_norm_numeric(member.u, p_c, Domain::ball(t.center, lambda), s).value;
      const double den = lp_norm_numeric(member.u, 2.0, Domain::ball(t.center, opts.outer_factor * lambda), s).value;
      row.ratio = std::pow(lambda, 1.0 / (d + 1.0)) * num / den;
    } catch (const ConvergenceError& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  for (int k : opts.ks) {
    double sup = 0.0;
    for (const auto& r : result.rows) {
      if (r.k == k && r.ok) sup = std::max(sup, r.ratio);
    }
    result.sup_by_k.emplace_back(k, sup);
    result.sup = std::max(result.sup, sup);
  }
  if (result.sup_by_k.size() >= 2) {
    std::vector<SweepRow> fit_rows_in;
    for (const auto& [k, sup] : result.sup_by_k) {
      SweepRow r;
      r.k = k;
      r.lambda = std::sqrt(static_cast<double>(opts.n) + 2.0 * k);
      r.estimate.value_log = std::log(sup);
      r.ok = sup > 0.0;
      fit_rows_in.push_back(r);
    }
    result.log_sup_slope = fit_rows(std::move(fit_rows_in), Regressor::LogLambda).slope;
  }
  return result;
}

namespace {

long exact_sqrt(long m) {
  const long a = std::labs(m);
  long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(a))));
  while (s * s > a) --s;
  while ((s + 1) * (s + 1) <= a) ++s;
  return s * s == a ? s : -1;
}

}  // namespace

GaussianFn scale_eigenfunction(const GaussianFn& g, long m) {
  if (m == 0) throw ValidationError("scale factor m must be nonzero");
  const long s = exact_sqrt(m);
  if (s < 0) throw ValidationError("exact scaling needs |m| to be a perfect square");
  CPoly poly(g.dim());
  for (const auto& [mono, c] : g.poly().terms()) {
    mpz_class factor;
    mpz_ui_pow_ui(factor.get_mpz_t(), static_cast<unsigned long>(s), static_cast<unsigned long>(mono.degree()));
    poly.add_term(mono, c * mpq_class(factor));
  }
  if (m < 0) poly = poly.conj();
  return GaussianFn(std::move(poly), g.width() * std::labs(m));
}

Evaluator scale_evaluator(const Evaluator& u, double m) {
  if (m == 0.0 || !std::isfinite(m)) throw ValidationError("scale factor m must be finite and nonzero");
  const double s = std::sqrt(std::abs(m));
  Evaluator out = u;
  out.decay = u.decay * std::abs(m);
  for (auto& c : out.center) c /= s;
  out.fn = [inner = u.fn, s, conj = m < 0](std::span<const std::complex<double>> z) {
    Point w(z.begin(), z.end());
    for (auto& x : w) x *= s;
    const std::complex<double> v = inner(w);
    return conj ? std::conj(v) : v;
  };
  if (u.radial) {
    out.radial = [inner = u.radial, s](double r) { return inner(s * r); };
  }
  return out;
}

std::vector<HeisenbergRow> heisenberg_check(const GaussianFn& g, const std::vector<long>& ms, const std::vector<int>& ps) {
  if (g.is_zero()) throw ValidationError("scaling check needs a nonzero function");
  const ExactValue g2 = lp_norm_exact_even(g, 2);
  std::vector<HeisenbergRow> rows;
  for (long m : ms) {
    const GaussianFn s = scale_eigenfunction(g, m);
    const ExactValue s2 = lp_norm_exact_even(s, 2);
    for (int p : ps) {
      if (p < 2 || p % 2 != 0) throw ValidationError("exact scaling check needs even p >= 2");
      HeisenbergRow row;
      row.m = m;
      row.p = p;
      row.observed = lp_norm_exact_even(s, p) / lp_norm_exact_even(g, p) * (g2 / s2).pow(p / 2);
      row.expected = ExactValue(mpq_class(std::labs(m))).pow(static_cast<int>(g.dim()) * (p / 2 - 1));
      row.equal = row.observed == row.expected;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace twisted
