#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "twisted/evaluator.hpp"

namespace twisted {

/// Integration region: all of R^{2n}, or a Euclidean ball.
struct Domain {
  enum class Kind { FullSpace, Ball };

  Kind kind = Kind::FullSpace;
  Point center;  // ball center as complex coordinates x_j + i y_j; empty means the origin
  double radius = 0.0;

  static Domain full_space() { return {}; }
  /// Throws ValidationError unless radius > 0.
  static Domain ball(Point center, double radius);
};

struct QuadSpec {
  int radial_nodes = 8;             // Gauss-Legendre nodes per radial panel
  double panel_width = 1.0;         // radial panel length
  int angular_nodes = 32;           // equal-angle nodes per circle (polar-angle GL uses half)
  double tail_radius_multiplier = 3.0;
  double target_rel_err = 1e-8;
  int max_doublings = 4;            // node-count doublings allowed before giving up

  /// Throws ValidationError on nonpositive counts or a multiplier below 1.
  void validate() const;
  QuadSpec doubled() const;
};

struct QuadResult {
  double value = 0.0;
  double rel_err = 0.0;  // relative change under the last doubling
  int doublings = 0;
};

struct ComplexQuadResult {
  std::complex<double> value;
  double abs_err = 0.0;
  int doublings = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int count);

/// ||u||_{L^p(dom)} for p >= 1. Doubles every node count until the relative change drops
/// below spec.target_rel_err; throws ConvergenceError when the budget runs out.
QuadResult lp_norm_numeric(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec);

/// Same, but returns the integral of |u|^p and its relative error.
QuadResult lp_power_numeric(const Evaluator& u, double p, const Domain& dom, const QuadSpec& spec);

/// Integral of u over the domain (signed/complex).
ComplexQuadResult integrate_numeric(const Evaluator& u, const Domain& dom, const QuadSpec& spec);

/// <u, v> = integral of u conj(v) over the domain.
ComplexQuadResult inner_numeric(const Evaluator& u, const Evaluator& v, const Domain& dom,
                                const QuadSpec& spec);

struct QuadNode {
  Point z;
  double w;
};

/// The nodes the engine would use for |u|^p on dom at exactly this resolution (no refinement).
/// Only the hints of `layout` matter; symmetry is ignored so the grid covers all directions.
std::vector<QuadNode> quadrature_nodes(const Evaluator& layout, double p, const Domain& dom, const QuadSpec& spec);

/// d/dr of the radial profile of u along the first real axis, by central difference.
double radial_profile_derivative(const Evaluator& u, double r);

/// Surface area of the unit sphere S^{d-1}.
double unit_sphere_area(int d);

/// Radius beyond which the tail of |u|^p is negligible for full-space integration.
double tail_radius(const Evaluator& u, double p, const QuadSpec& spec);

}  // namespace twisted
