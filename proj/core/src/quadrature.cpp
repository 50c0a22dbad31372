#include "sdstein/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "sdstein/errors.hpp"

namespace sdstein {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights
// mu_0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Vec& diag, const Vec& offdiag, double mu0) {
  const int n = static_cast<int>(diag.size());
  Mat jacobi = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = diag[i];
    if (i + 1 < n) {
      jacobi(i, i + 1) = offdiag[i];
      jacobi(i + 1, i) = offdiag[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

QuadratureRule make_gauss_legendre(int n) {
  Vec diag = Vec::Zero(n);
  Vec off(n - 1 > 0 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) {
    const double k = i;
    off[i - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  auto rule = golub_welsch(diag, off, 2.0);
  // Symmetrise nodes/weights exactly about 0.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double weight = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -node;
    rule.nodes[j] = node;
    rule.weights[i] = rule.weights[j] = weight;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule make_gauss_hermite(int n) {
  Vec diag = Vec::Zero(n);
  Vec off(n - 1 > 0 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(i / 2.0);
  auto rule = golub_welsch(diag, off, std::sqrt(M_PI));
  // Renormalise so the weights sum to sqrt(pi) exactly; convex averaging
  // downstream (mollification) relies on the exact total mass.
  double total = 0.0;
  for (const double w : rule.weights) total += w;
  const double fix = std::sqrt(M_PI) / total;
  for (double& w : rule.weights) w *= fix;
  return rule;
}

const QuadratureRule& cached_rule(int n, bool hermite) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace({n, hermite});
  if (inserted) it->second = hermite ? make_gauss_hermite(n) : make_gauss_legendre(n);
  return it->second;
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

// One 7-point and one 15-point Gauss evaluation on [a,b]; the difference is
// the error estimate.
Interval evaluate_interval(const std::function<double(double)>& f, double a, double b) {
  const QuadratureRule& low = gauss_legendre(7);
  const QuadratureRule& high = gauss_legendre(15);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double coarse = 0.0, fine = 0.0;
  for (int i = 0; i < 7; ++i) coarse += low.weights[i] * f(mid + half * low.nodes[i]);
  for (int i = 0; i < 15; ++i) fine += high.weights[i] * f(mid + half * high.nodes[i]);
  coarse *= half;
  fine *= half;
  return {a, b, fine, std::abs(fine - coarse)};
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) { return cached_rule(n, false); }
const QuadratureRule& gauss_hermite(int n) { return cached_rule(n, true); }

QuadratureRule mapped_rule(const QuadratureRule& base, double a, double b) {
  QuadratureRule out;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  out.nodes.reserve(base.nodes.size());
  out.weights.reserve(base.nodes.size());
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    out.nodes.push_back(mid + half * base.nodes[i]);
    out.weights.push_back(half * base.weights[i]);
  }
  return out;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                  double b, const AdaptiveOptions& opts) {
  AdaptiveResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<Interval> queue;
  queue.push(evaluate_interval(f, a, b));
  result.evaluations = 22;
  double total = queue.top().value;
  double total_error = queue.top().error;
  int intervals = 1;
  while (intervals < opts.max_intervals) {
    const double budget = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (total_error <= budget) break;
    Interval worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Interval left = evaluate_interval(f, worst.a, mid);
    Interval right = evaluate_interval(f, mid, worst.b);
    result.evaluations += 44;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++intervals;
  }
  result.value = total;
  result.error_estimate = total_error;
  result.converged = total_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  if (!result.converged && opts.throw_on_failure) {
    throw QuadratureFailure("adaptive quadrature did not converge within the interval budget");
  }
  return result;
}

TailResult integrate_tail(const std::function<double(double)>& f, double a,
                          const TailOptions& opts) {
  TailResult result;
  const QuadratureRule& base = gauss_legendre(opts.panel_nodes);
  double lo = a;
  double prev = kInf;
  int stall = 0;
  for (int panel = 0; panel < opts.max_panels; ++panel) {
    const double hi = lo * opts.growth + (lo == 0.0 ? 1.0 : 0.0);
    const auto rule = mapped_rule(base, lo, hi);
    double contribution = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      contribution += rule.weights[i] * f(rule.nodes[i]);
    }
    result.value += contribution;
    result.panels = panel + 1;
    const double magnitude = std::abs(contribution);
    if (magnitude < opts.abs_tol) {
      result.converged = true;
      return result;
    }
    // A tail whose panel sums stop shrinking is treated as divergent.
    if (magnitude >= prev * 0.999) {
      if (++stall >= 8) return result;
    } else {
      stall = 0;
    }
    prev = magnitude;
    lo = hi;
  }
  return result;
}

std::vector<SphereNode> sphere_rule(int dim, int resolution) {
  std::vector<SphereNode> nodes;
  if (dim == 1) {
    nodes.push_back({Vec::Constant(1, 1.0), 0.5});
    nodes.push_back({Vec::Constant(1, -1.0), 0.5});
    return nodes;
  }
  if (dim == 2) {
    const int m = std::max(resolution, 4);
    nodes.reserve(m);
    for (int i = 0; i < m; ++i) {
      const double angle = 2.0 * M_PI * (i + 0.5) / m;
      Vec u(2);
      u << std::cos(angle), std::sin(angle);
      nodes.push_back({u, 1.0 / m});
    }
    return nodes;
  }
  if (dim == 3) {
    // Product rule: 6 Gauss-Legendre nodes in cos(theta) x 12 azimuth angles,
    // exact for spherical polynomials through degree 11.
    const QuadratureRule& gl = gauss_legendre(6);
    const int n_phi = 12;
    for (int i = 0; i < 6; ++i) {
      const double cos_theta = gl.nodes[i];
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
      for (int j = 0; j < n_phi; ++j) {
        const double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
        Vec u(3);
        u << sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta;
        nodes.push_back({u, gl.weights[i] / (2.0 * n_phi)});
      }
    }
    return nodes;
  }
  throw Error("sphere_rule: only dimensions 1..3 are supported");
}

}  // namespace sdstein
