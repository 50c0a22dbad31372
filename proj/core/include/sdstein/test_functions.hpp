#pragma once

// Smooth test functions with certified derivative bounds.
//
// H_r is the class of bounded C^r functions with max_{0<=l<=r} M_l(h) <= 1,
// where M_l is the sup over x of the operator norm of the l-th derivative.
// Every factory here produces evaluators for the value, gradient and Hessian
// together with certified M_0, M_1, M_2 (analytic envelopes, verified on a
// grid by the test suite) and the largest r it certifies.
//
// mollify() realises the Gaussian regularisation
//   h_eps(x) = E h(x - eps Z), Z ~ N(0, I_d),
// by Gauss-Hermite quadrature; it preserves sup norm and Lipschitz constant
// and satisfies ||h - h_eps||_inf <= d * eps for 1-Lipschitz seeds.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdstein/types.hpp"

namespace sdstein {

struct SmoothTestFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  double m0 = 0.0;  // certified sup |h|
  double m1 = 0.0;  // certified sup ||grad h||
  double m2 = 0.0;  // certified sup ||Hess h||_op
  int order = 0;    // largest r with the H_r certificate
  std::optional<double> support_radius;
  std::string name;

  bool in_h1() const { return order >= 1; }
  bool in_h2() const { return order >= 2; }
};

/// amp * tanh((<w,x> + shift)/s); certified via |tanh'| <= 1,
/// |tanh''| <= 4/(3 sqrt(3)).
SmoothTestFunction tanh_ramp(const Vec& w, double shift, double sharpness,
                             double amp = 1.0);

/// Rescaled tanh ramp guaranteed to lie in H_2.
SmoothTestFunction tanh_ramp_h2(const Vec& w, double shift);

/// amp * prod_j cos(omega_j x_j + phase_j).
SmoothTestFunction cosine_product(const Vec& omega, const Vec& phase, double amp);

/// amp * exp(-1/(1 - ||(x-c)/R||^2)) inside the ball, 0 outside; compactly
/// supported and infinitely differentiable.
SmoothTestFunction compact_bump(const Vec& center, double radius, double amp = 1.0);

/// Gaussian mollification of a Lipschitz seed (nodes per axis: Gauss-Hermite).
/// `lip` and `sup` are the seed's certified Lipschitz constant and sup norm.
SmoothTestFunction mollify(std::function<double(const Vec&)> seed,
                           std::function<Vec(const Vec&)> seed_gradient, double lip,
                           double sup, int dim, double eps, int nodes = 32);

/// Scale a function by 1/max(1, M_1, M_2) so the result certifies H_2.
SmoothTestFunction scaled_to_h2(SmoothTestFunction f);

/// A finite certified dictionary: tanh ramps, cosine products and mollified
/// norm cones, all with max_l M_l <= 1 for l up to their order.
class TestFunctionDictionary {
 public:
  static TestFunctionDictionary standard(int dim, int size, std::uint64_t seed);

  const std::vector<SmoothTestFunction>& members() const { return members_; }
  /// Members whose certificate covers H_r (order >= r).
  std::vector<const SmoothTestFunction*> certified(int r) const;
  int dim() const { return dim_; }

 private:
  int dim_ = 1;
  std::vector<SmoothTestFunction> members_;
};

/// Max over a grid of |h|, ||grad h||, ||Hess||_op and the worst mismatch
/// between the gradient evaluator and central differences of the value;
/// used by the certification tests.
struct CertificateAudit {
  double max_value = 0.0;
  double max_gradient = 0.0;
  double max_hessian = 0.0;
  double worst_gradient_fd_gap = 0.0;
};
CertificateAudit audit_certificates(const SmoothTestFunction& f,
                                    const std::vector<Vec>& grid, double fd_step = 1e-5);

}  // namespace sdstein
