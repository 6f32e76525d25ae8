#include "twisted/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "twisted/errors.hpp"

namespace twisted {

Domain Domain::ball(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball radius must be positive");
  Domain d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

void QuadSpec::validate() const {
  if (radial_nodes < 1 || angular_nodes < 1 || max_doublings < 1) {
    throw ValidationError("quadrature node counts must be positive");
  }
  if (!(panel_width > 0.0)) throw ValidationError("panel width must be positive");
  if (!(tail_radius_multiplier >= 1.0)) throw ValidationError("tail radius multiplier must be >= 1");
  if (!(target_rel_err > 0.0)) throw ValidationError("target relative error must be positive");
}

QuadSpec QuadSpec::doubled() const {
  QuadSpec s = *this;
  s.radial_nodes *= 2;
  s.angular_nodes *= 2;
  return s;
}

const GaussLegendre& gauss_legendre(int count) {
  if (count < 1) throw ValidationError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(count);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(count));
  gl.weights.resize(static_cast<std::size_t>(count));
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = count * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= count; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
    }
    dp = count * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[static_cast<std::size_t>(i)] = -x;
    gl.nodes[static_cast<std::size_t>(count - 1 - i)] = x;
    gl.weights[static_cast<std::size_t>(i)] = w;
    gl.weights[static_cast<std::size_t>(count - 1 - i)] = w;
  }
  return cache.emplace(count, std::move(gl)).first->second;
}

double unit_sphere_area(int d) {
  if (d < 1) throw ValidationError("sphere dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double tail_radius(const Evaluator& u, double p, const QuadSpec& spec) {
  const double t = u.decay;
  return u.center_norm() + std::sqrt(2.0 * u.degree / t) + spec.tail_radius_multiplier * 3.0 / std::sqrt(p * t);
}

namespace {

// Neumaier-compensated accumulator; fixed summation order keeps results deterministic.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ComplexAccumulator {
  Accumulator re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

struct RadialNode {
  double r;
  double w;
};

// Composite Gauss-Legendre on [0, radius].
std::vector<RadialNode> radial_nodes(double radius, const QuadSpec& spec) {
  const int panels = std::max(1, static_cast<int>(std::ceil(radius / spec.panel_width)));
  const double h = radius / panels;
  const GaussLegendre& gl = gauss_legendre(spec.radial_nodes);
  std::vector<RadialNode> out;
  out.reserve(static_cast<std::size_t>(panels * spec.radial_nodes));
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double a = pnl * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      out.push_back({a + 0.5 * h * (gl.nodes[i] + 1.0), 0.5 * h * gl.weights[i]});
    }
  }
  return out;
}

int angular_count(const Evaluator& u, double p, const QuadSpec& spec) {
  // For even p the angular integrand is a trigonometric polynomial of degree <= p * degree.
  // In d >= 4 the grid is a product over d - 1 angles, so the floor is halved.
  const int needed = static_cast<int>(std::ceil(p * u.degree)) + 2;
  const int floor = u.n == 1 ? spec.angular_nodes : std::max(4, spec.angular_nodes / 2);
  return std::max(floor, needed);
}

Point offset(const Point& center, std::size_t n) {
  if (center.empty()) return Point(n, {0.0, 0.0});
  if (center.size() != n) throw ValidationError("center has wrong dimension");
  return center;
}

bool is_origin(const Point& c) {
  return std::all_of(c.begin(), c.end(), [](const auto& x) { return x == std::complex<double>{}; });
}

// Calls f(z, weight) for every node of the layout chosen for (u, dom).
template <class F>
void for_each_node(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec, F&& f) {
  const std::size_t n = u.n;
  const int d = static_cast<int>(2 * n);
  Point z(n);

  const bool ball = dom.kind == Domain::Kind::Ball;
  const Point center = ball ? offset(dom.center, n) : Point(n, {0.0, 0.0});
  const double radius = ball ? dom.radius : tail_radius(u, p, spec);

  if (u.symmetry == Evaluator::Symmetry::Radial && (!ball || is_origin(center))) {
    const double area = unit_sphere_area(d);
    for (const auto& node : radial_nodes(radius, spec)) {
      std::fill(z.begin(), z.end(), std::complex<double>{});
      z[0] = node.r;
      f(z, node.w * area * std::pow(node.r, d - 1));
    }
    return;
  }

  if (!ball && u.symmetry == Evaluator::Symmetry::PolyRadial) {
    const auto nodes = radial_nodes(radius, spec);
    std::vector<std::size_t> idx(n, 0);
    const double two_pi = 2.0 * std::numbers::pi;
    while (true) {
      double w = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        z[j] = nodes[idx[j]].r;
        w *= two_pi * nodes[idx[j]].r * nodes[idx[j]].w;
      }
      f(z, w);
      std::size_t j = 0;
      while (j < n && ++idx[j] == nodes.size()) idx[j++] = 0;
      if (j == n) break;
    }
    return;
  }

  const int n_theta = angular_count(u, p, spec);
  const double dtheta = 2.0 * std::numbers::pi / n_theta;

  if (!ball && n == 1) {
    for (const auto& node : radial_nodes(radius, spec)) {
      for (int i = 0; i < n_theta; ++i) {
        z[0] = std::polar(node.r, i * dtheta);
        f(z, node.r * node.w * dtheta);
      }
    }
    return;
  }

  if (!ball || is_origin(center)) {
    // z_j = r sqrt(s_j) e^{i theta_j} with s on the unit simplex; the volume element is
    // 2^{1-n} r^{2n-1} dr ds dtheta. Even-p integrands are polynomial in s after the theta sum.
    // The simplex uses collapsed coordinates s_1 = x_1, s_2 = (1 - x_1) x_2, ...
    const int m = std::max(2, n_theta / 2);
    const GaussLegendre& gl = gauss_legendre(m);
    struct Cell {
      std::vector<double> sqrt_s;
      double w;
    };
    std::vector<Cell> cells;
    std::vector<int> idx(n - 1, 0);
    while (true) {
      Cell c{std::vector<double>(n), 1.0};
      double rest = 1.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x = 0.5 * (gl.nodes[static_cast<std::size_t>(idx[i])] + 1.0);
        c.w *= 0.5 * gl.weights[static_cast<std::size_t>(idx[i])] * rest;
        c.sqrt_s[i] = std::sqrt(rest * x);
        rest *= 1.0 - x;
      }
      c.sqrt_s[n - 1] = std::sqrt(rest);
      cells.push_back(std::move(c));
      std::size_t i = 0;
      while (i + 1 < n && ++idx[i] == m) idx[i++] = 0;
      if (i + 1 >= n) break;
    }
    const double torus_w = std::pow(dtheta, static_cast<double>(n)) * std::pow(2.0, 1.0 - static_cast<double>(n));
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(n_theta));
    for (int t = 0; t < n_theta; ++t) phase[static_cast<std::size_t>(t)] = std::polar(1.0, t * dtheta);
    for (const auto& node : radial_nodes(radius, spec)) {
      const double rw = node.w * std::pow(node.r, d - 1) * torus_w;
      for (const auto& c : cells) {
        std::vector<int> th(n, 0);
        while (true) {
          for (std::size_t j = 0; j < n; ++j) {
            z[j] = center[j] + node.r * c.sqrt_s[j] * phase[static_cast<std::size_t>(th[j])];
          }
          f(z, rw * c.w);
          std::size_t j = 0;
          while (j < n && ++th[j] == n_theta) th[j++] = 0;
          if (j == n) break;
        }
      }
    }
    return;
  }

  // Off-center balls: hyperspherical grid centered at the ball center. Real coordinate i maps to x_i (i < n)
  // or y_{i-n}.
  struct Direction {
    std::vector<double> omega;
    double w;
  };
  std::vector<Direction> dirs;
  {
    const int polar_count = std::max(2, n_theta / 2);
    const GaussLegendre& gl = gauss_legendre(polar_count);
    const int n_polar = d - 2;
    std::vector<int> idx(static_cast<std::size_t>(n_polar), 0);
    while (true) {
      double sin_prod = 1.0;
      double w = 1.0;
      std::vector<double> base(static_cast<std::size_t>(d), 0.0);
      for (int i = 0; i < n_polar; ++i) {
        const double phi = 0.5 * std::numbers::pi * (gl.nodes[static_cast<std::size_t>(idx[i])] + 1.0);
        const double wphi = 0.5 * std::numbers::pi * gl.weights[static_cast<std::size_t>(idx[i])];
        base[static_cast<std::size_t>(i)] = sin_prod * std::cos(phi);
        w *= wphi * std::pow(std::sin(phi), d - 2 - i);
        sin_prod *= std::sin(phi);
      }
      for (int t = 0; t < n_theta; ++t) {
        Direction dir{base, w * dtheta};
        dir.omega[static_cast<std::size_t>(d - 2)] = sin_prod * std::cos(t * dtheta);
        dir.omega[static_cast<std::size_t>(d - 1)] = sin_prod * std::sin(t * dtheta);
        dirs.push_back(std::move(dir));
      }
      int i = 0;
      while (i < n_polar && ++idx[static_cast<std::size_t>(i)] == polar_count) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == n_polar) break;
    }
  }
  for (const auto& node : radial_nodes(radius, spec)) {
    const double rw = node.w * std::pow(node.r, d - 1);
    for (const auto& dir : dirs) {
      for (std::size_t j = 0; j < n; ++j) {
        z[j] = center[j] + node.r * std::complex<double>(dir.omega[j], dir.omega[n + j]);
      }
      f(z, rw * dir.w);
    }
  }
}

double power_sum(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec) {
  Accumulator acc;
  const bool radial = u.symmetry == Evaluator::Symmetry::Radial && u.radial;
  for_each_node(u, p, dom, spec, [&](std::span<const std::complex<double>> z, double w) {
    const double mod = radial ? std::abs(u.radial(std::abs(z[0]))) : std::abs(u(z));
    if (mod > 0.0) acc.add(w * std::pow(mod, p));
  });
  return acc.value();
}

double relative_change(double now, double before) {
  if (now == before) return 0.0;
  return std::abs(now - before) / std::max(std::abs(now), std::abs(before));
}

// Relative errors below this are indistinguishable from summation noise.
constexpr double kErrorFloor = 1e-14;

QuadResult converge_power(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec,
                          bool as_norm) {
  spec.validate();
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite number >= 1");
  auto measure = [&](const QuadSpec& s) {
    const double integral = power_sum(u, p, dom, s);
    return as_norm ? std::pow(integral, 1.0 / p) : integral;
  };
  QuadSpec s = spec;
  double prev = measure(s);
  double rel = 0.0;
  for (int i = 1; i <= spec.max_doublings; ++i) {
    s = s.doubled();
    const double cur = measure(s);
    rel = relative_change(cur, prev);
    if (rel <= spec.target_rel_err) return {cur, std::max(rel, kErrorFloor), i};
    prev = cur;
  }
  throw ConvergenceError("Lp quadrature did not converge within the node budget", prev, rel);
}

template <class Sum>
ComplexQuadResult converge_complex(const QuadSpec& spec, double scale, Sum&& sum) {
  spec.validate();
  QuadSpec s = spec;
  std::complex<double> prev = sum(s);
  double err = 0.0;
  for (int i = 1; i <= spec.max_doublings; ++i) {
    s = s.doubled();
    const std::complex<double> cur = sum(s);
    err = std::abs(cur - prev);
    if (err <= spec.target_rel_err * scale) return {cur, std::max(err, kErrorFloor * scale), i};
    prev = cur;
  }
  throw ConvergenceError("quadrature did not converge within the node budget", std::abs(prev),
                         scale > 0 ? err / scale : err);
}

}  // namespace

QuadResult lp_norm_numeric(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec) {
  return converge_power(u, p, dom, spec, true);
}

QuadResult lp_power_numeric(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec) {
  return converge_power(u, p, dom, spec, false);
}

ComplexQuadResult integrate_numeric(const Evaluator& u, const Domain& dom, const QuadSpec& spec) {
  // Errors are measured against the L^1 mass so sign cancellation cannot stall convergence.
  const double l1 = power_sum(u, 1.0, dom, spec.doubled());
  return converge_complex(spec, std::max(l1, 1e-300), [&](const QuadSpec& s) {
    ComplexAccumulator acc;
    for_each_node(u, 1.0, dom, s, [&](std::span<const std::complex<double>> z, double w) { acc.add(w * u(z)); });
    return acc.value();
  });
}

ComplexQuadResult inner_numeric(const Evaluator& u, const Evaluator& v, const Domain& dom,
                                const QuadSpec& spec) {
  if (u.n != v.n) throw ValidationError("inner product dimension mismatch");
  // Layout from the product's hints: decay adds, degrees add, centers dominate the radius.
  Evaluator layout;
  layout.n = u.n;
  layout.decay = 0.5 * (u.decay + v.decay);
  layout.degree = 0.5 * (u.degree + v.degree);
  layout.center = u.center_norm() >= v.center_norm() ? u.center : v.center;
  const double scale = std::sqrt(power_sum(u, 2.0, dom, spec.doubled()) * power_sum(v, 2.0, dom, spec.doubled()));
  return converge_complex(spec, std::max(scale, 1e-300), [&](const QuadSpec& s) {
    ComplexAccumulator acc;
    for_each_node(layout, 2.0, dom, s, [&](std::span<const std::complex<double>> z, double w) {
      acc.add(w * u(z) * std::conj(v(z)));
    });
    return acc.value();
  });
}

std::vector<QuadNode> quadrature_nodes(const Evaluator& layout, double p, const Domain& dom, const QuadSpec& spec) {
  spec.validate();
  std::vector<QuadNode> out;
  Evaluator general = layout;
  general.symmetry = Evaluator::Symmetry::General;  // radial layouts put every node on one ray
  for_each_node(general, p, dom, spec, [&](std::span<const std::complex<double>> z, double w) {
    out.push_back({Point(z.begin(), z.end()), w});
  });
  return out;
}

double radial_profile_derivative(const Evaluator& u, double r) {
  if (!(r >= 0.0)) throw ValidationError("radius must be nonnegative");
  const double h = 1e-4 * std::max(1.0, r);
  auto at = [&](double s) {
    Point z(u.n, {0.0, 0.0});
    z[0] = s;
    return u(z).real();
  };
  return (at(r + h) - at(r - h)) / (2.0 * h);
}

}  // namespace twisted
