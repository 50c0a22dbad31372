#pragma once

// Quadrature building blocks shared by the whole library:
//   * Gauss-Legendre / Gauss-Hermite rules (Golub-Welsch on the Jacobi matrix)
//   * an adaptive integrator on finite intervals with a nested low/high pair
//     error estimate and dyadic refinement
//   * semi-infinite integration by geometric panel continuation
//   * fixed node sets on the unit sphere S^{d-1}, d <= 3

#include <functional>
#include <vector>

#include "sdstein/types.hpp"

namespace sdstein {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// n-point Gauss-Hermite rule for integrals against exp(-z^2) dz, with the
/// weights normalised so that they sum to sqrt(pi) exactly.
const QuadratureRule& gauss_hermite(int n);

/// Gauss-Legendre rule mapped onto [a, b].
QuadratureRule mapped_rule(const QuadratureRule& base, double a, double b);

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_intervals = 4000;
  bool throw_on_failure = true;
};

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Adaptive integration of f on [a, b]; error per interval from the
/// difference of nested 7/15-point Gauss rules, worst interval split first.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                  double b, const AdaptiveOptions& opts = {});

struct TailOptions {
  double abs_tol = 1e-10;
  double growth = 2.0;     // geometric panel growth factor
  int max_panels = 200;    // divergence guard
  int panel_nodes = 15;
};

struct TailResult {
  double value = 0.0;
  bool converged = false;  // false when panel sums refuse to decay
  int panels = 0;
};

/// Integral of f over [a, infinity) by geometric panels [a, ga], [ga, g^2 a]...
/// Stops when the panel contribution falls below abs_tol; reports divergence
/// when panels stop decaying.
TailResult integrate_tail(const std::function<double(double)>& f, double a,
                          const TailOptions& opts = {});

struct SphereNode {
  Vec direction;
  double weight;  // weights sum to 1
};

/// Fixed spherical rule: d=1 two points, d=2 uniform angles (degree ~ n-1),
/// d=3 a product Gauss-Legendre x azimuth set exact through degree 11.
std::vector<SphereNode> sphere_rule(int dim, int resolution = 32);

}  // namespace sdstein
