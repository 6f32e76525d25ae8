#include "twisted/opnorm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "twisted/eigenbasis.hpp"
#include "twisted/errors.hpp"
#include "twisted/projection.hpp"

namespace twisted {

std::string to_string(NormEstimate::Kind kind) {
  switch (kind) {
    case NormEstimate::Kind::Exact:
      return "Exact";
    case NormEstimate::Kind::CandidateLowerBound:
      return "CandidateLowerBound";
    case NormEstimate::Kind::PowerIterationLowerBound:
      return "PowerIterationLowerBound";
  }
  return "Exact";
}

NormEstimate::Kind kind_from_string(const std::string& s) {
  if (s == "Exact") return NormEstimate::Kind::Exact;
  if (s == "CandidateLowerBound") return NormEstimate::Kind::CandidateLowerBound;
  if (s == "PowerIterationLowerBound") return NormEstimate::Kind::PowerIterationLowerBound;
  throw ValidationError("unknown estimate kind '" + s + "'");
}

namespace {

void check_level(std::size_t n, int k) {
  if (n < 1) throw ValidationError("dimension n must be >= 1");
  if (k < 0) throw ValidationError("level k must be nonnegative");
}

void check_p(double p) {
  if (!(p >= 1.0)) throw ValidationError("p must be >= 1");
}

}  // namespace

NormEstimate norm_2_to_infty(std::size_t n, int k) {
  check_level(n, k);
  NormEstimate e;
  e.value_log = 0.5 * kernel_diag_origin(n, k).log();
  e.kind = NormEstimate::Kind::Exact;
  e.n = n;
  e.k = k;
  e.p = std::numeric_limits<double>::infinity();
  e.B = k;
  return e;
}

NormEstimate candidate_ratio_zbar(std::size_t n, int k, double p) {
  check_level(n, k);
  check_p(p);
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  // ||z_1^k e||_2^2 = pi^n k!
  const double log_l2 = 0.5 * (dn * std::log(std::numbers::pi) + log_gamma(dk + 1.0));
  double log_lp;
  if (std::isinf(p)) {
    // sup r^k e^{-r^2/2} at r^2 = k
    log_lp = k == 0 ? 0.0 : 0.5 * dk * (std::log(dk) - 1.0);
  } else {
    // ||.||_p^p = (2 pi/p)^n (2/p)^{kp/2} Gamma(kp/2 + 1)
    const double h = 0.5 * dk * p;
    log_lp = (dn * std::log(2.0 * std::numbers::pi / p) + h * std::log(2.0 / p) + log_gamma(h + 1.0)) / p;
  }
  NormEstimate e;
  e.value_log = log_lp - log_l2;
  e.kind = NormEstimate::Kind::CandidateLowerBound;
  e.n = n;
  e.k = k;
  e.p = p;
  return e;
}

NormEstimate candidate_ratio_radial(std::size_t n, int k, double p, const QuadSpec& spec) {
  check_level(n, k);
  check_p(p);
  NormEstimate e;
  e.kind = NormEstimate::Kind::CandidateLowerBound;
  e.n = n;
  e.k = k;
  e.p = p;
  e.B = k;
  if (std::isinf(p)) {
    // |f_k| peaks at the origin
    e.value_log = norm_2_to_infty(n, k).value_log;
    return e;
  }
  const RadialProfile profile(n, k);
  // Panels no wider than the oscillation scale 1/sqrt(n + 2k) allows.
  QuadSpec s = spec;
  s.panel_width = std::min(spec.panel_width, 2.0 / std::sqrt(static_cast<double>(n + 2 * k)));
  const QuadResult q = lp_norm_numeric(make_radial_evaluator(profile), p, Domain::full_space(), s);
  e.value_log = std::log(q.value) + profile.log_value_at_zero() - profile.log_l2_norm();
  e.tolerance = q.rel_err;
  return e;
}

namespace {

using Vec = std::vector<std::complex<double>>;

// Normalized basis sampled on a fixed grid: E[i * m + j] = e_j(z_i).
struct Grid {
  std::size_t m = 0;
  std::vector<double> w;
  Vec E;

  Vec field(const Vec& v) const {
    Vec f(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t j = 0; j < m; ++j) s += E[i * m + j] * v[j];
      f[i] = s;
    }
    return f;
  }

  double power(const Vec& f, double p) const {
    double s = 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      // Kahan; the grid is large
      const double y = w[i] * std::pow(std::abs(f[i]), p) - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return s;
  }

  // Coefficients of the truncated projection of |f|^{p-2} f.
  Vec pullback(const Vec& f, double p) const {
    Vec g(m, {0.0, 0.0});
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = std::abs(f[i]);
      if (a == 0.0) continue;
      const std::complex<double> r = w[i] * std::pow(a, p - 2.0) * f[i];
      for (std::size_t j = 0; j < m; ++j) g[j] += std::conj(E[i * m + j]) * r;
    }
    return g;
  }

  double gram_defect() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * E[i * m + a] * std::conj(E[i * m + b]);
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    }
    return worst;
  }
};

Grid build_grid(const std::vector<EigenLabel>& labels, double p, const QuadSpec& spec) {
  Evaluator layout;
  layout.n = labels.front().dim();
  layout.decay = 1.0;
  int degree = 0;
  for (const auto& l : labels) degree = std::max(degree, l.alpha.order() + l.beta.order());
  layout.degree = degree;
  // Low degrees: the exact polynomials in double precision are much cheaper than the
  // log-space Laguerre form and still free of cancellation trouble.
  std::vector<Evaluator> exact;
  std::vector<double> inv_norm;
  if (degree <= 24) {
    for (const auto& l : labels) {
      exact.push_back(make_evaluator(build_eigenfunction(l).fn));
      inv_norm.push_back(1.0 / std::sqrt(exact_l2_norm_sq(l).to_double()));
    }
  }
  Grid g;
  g.m = labels.size();
  for (const auto& node : quadrature_nodes(layout, p, Domain::full_space(), spec)) {
    g.w.push_back(node.w);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      g.E.push_back(exact.empty() ? normalized_eigen_value(labels[j], node.z) : exact[j](node.z) * inv_norm[j]);
    }
  }
  return g;
}

double norm2(const Vec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

void normalize(Vec& v) {
  const double s = norm2(v);
  for (auto& x : v) x /= s;
}

struct Run {
  double value_log = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

Run iterate(const Grid& grid, Vec v, double p, double tol, int max_iter) {
  Run run;
  normalize(v);
  Vec f = grid.field(v);
  double obj = grid.power(f, p);
  run.trace.push_back(std::log(obj) / p);
  for (int it = 1; it <= max_iter; ++it) {
    Vec g = grid.pullback(f, p);
    if (norm2(g) == 0.0) break;
    normalize(g);
    const Vec f_new = grid.field(g);
    const double next = grid.power(f_new, p);
    run.iterations = it;
    const double change = std::abs(next - obj) / std::max(next, obj);
    // Convexity makes the objective non-decreasing; a drop below rounding means a bad grid.
    if (next < obj) {
      run.converged = change < tol;
      break;
    }
    v = std::move(g);
    f = f_new;
    obj = next;
    run.trace.push_back(std::log(obj) / p);
    if (change < tol) {
      run.converged = true;
      break;
    }
  }
  run.value_log = std::log(obj) / p;
  return run;
}

}  // namespace

NormEstimate norm_2_to_p_lower_power(std::size_t n, int k, double p, const PowerIterationOptions& opts) {
  check_level(n, k);
  if (!(p > 2.0) || std::isinf(p)) throw ValidationError("power iteration needs finite p > 2");
  if (opts.B < 0) throw ValidationError("truncation B must be nonnegative");
  if (opts.max_iter < 1 || opts.random_restarts < 0) throw ValidationError("invalid iteration budget");
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
  opts.grid.validate();

  const std::vector<EigenLabel> labels = enumerate_labels(n, k, opts.B);
  const std::size_t m = labels.size();

  // Embedded starts. Symmetric copies under coordinate permutations are equivalent, so only
  // the coordinate-1 representative is used.
  std::vector<Vec> starts;
  {
    MultiIndex a(n);
    a[0] = k;
    const EigenLabel zbar(a, MultiIndex(n));
    Vec v(m, {0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) {
      if (labels[j] == zbar) v[j] = 1.0;
    }
    starts.push_back(v);
  }
  const std::size_t zbar_start = 0;
  if (opts.B >= k) {
    Vec v(m, {0.0, 0.0});
    for (const auto& [label, c] : expand(build_radial(n, k)).entries) {
      const auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) continue;
      v[static_cast<std::size_t>(it - labels.begin())] = c.to_complex() * std::sqrt(exact_l2_norm_sq(label).to_double());
    }
    starts.push_back(v);
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < opts.random_restarts; ++r) {
    Vec v(m);
    for (auto& x : v) x = {gauss(rng), gauss(rng)};
    starts.push_back(v);
  }

  // Refine until the basis is orthonormal on the grid, the zbar^k state reproduces its
  // closed-form ratio and every start's objective is stable under one more doubling. The
  // iteration then runs on the coarser grid of the last agreeing pair.
  const double exact_zbar = candidate_ratio_zbar(n, k, p).value_log;
  auto objectives = [&](const Grid& g) {
    std::vector<double> out;
    for (Vec v : starts) {
      normalize(v);
      out.push_back(std::log(g.power(g.field(v), p)) / p);
    }
    return out;
  };
  QuadSpec spec = opts.grid;
  Grid grid = build_grid(labels, p, spec);
  std::vector<double> prev = objectives(grid);
  double defect = 0.0;
  for (int i = 1;; ++i) {
    spec = spec.doubled();
    Grid finer = build_grid(labels, p, spec);
    const std::vector<double> cur = objectives(finer);
    defect = std::max({grid.gram_defect(), std::abs(prev[zbar_start] - exact_zbar)});
    for (std::size_t j = 0; j < cur.size(); ++j) defect = std::max(defect, std::abs(cur[j] - prev[j]));
    if (defect <= opts.grid.target_rel_err) break;
    if (i == opts.grid.max_doublings) {
      throw ConvergenceError("power-iteration grid does not resolve the eigenspace", cur[zbar_start], defect);
    }
    grid = std::move(finer);
    prev = cur;
  }

  Run best;
  for (const Vec& s : starts) {
    Run r = iterate(grid, s, p, opts.tol, opts.max_iter);
    if (r.value_log > best.value_log) best = std::move(r);
  }

  NormEstimate e;
  e.value_log = best.value_log;
  e.kind = NormEstimate::Kind::PowerIterationLowerBound;
  e.n = n;
  e.k = k;
  e.p = p;
  e.B = opts.B;
  e.iterations = best.iterations;
  e.tolerance = std::max(opts.tol, defect);
  e.seed = opts.seed;
  e.converged = best.converged;
  e.objective_trace = std::move(best.trace);
  return e;
}

}  // namespace twisted
