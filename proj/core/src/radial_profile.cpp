#include "sdstein/radial_profile.hpp"

#include <algorithm>
#include <cmath>

#include "sdstein/errors.hpp"

namespace sdstein {

namespace {

// E1(x) = int_x^inf e^{-s}/s ds, via std::expint.
double exp_integral_e1(double x) { return -std::expint(-x); }

}  // namespace

RadialProfile RadialProfile::power(double coeff, double alpha) {
  if (coeff <= 0.0) throw Error("power profile: coefficient must be positive");
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw Error("power profile: alpha must lie in (1,2)");
  }
  RadialProfile p;
  p.kind_ = Kind::Power;
  p.coeff_ = coeff;
  p.alpha_ = alpha;
  return p;
}

RadialProfile RadialProfile::exponential(double coeff, double beta) {
  if (coeff <= 0.0 || beta <= 0.0) {
    throw Error("exponential profile: coefficient and rate must be positive");
  }
  RadialProfile p;
  p.kind_ = Kind::Exponential;
  p.coeff_ = coeff;
  p.beta_ = beta;
  return p;
}

RadialProfile RadialProfile::tabulated(std::vector<double> r, std::vector<double> k,
                                       bool validate) {
  if (r.size() != k.size() || r.size() < 2) {
    throw Error("tabulated profile: need matching r/k columns with >= 2 rows");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) throw Error("tabulated profile: radii must be positive");
    if (k[i] < 0.0) throw Error("tabulated profile: values must be nonnegative");
    if (i > 0 && r[i] <= r[i - 1]) {
      throw Error("tabulated profile: radii must be strictly increasing");
    }
    if (validate && i > 0 && k[i] > k[i - 1] + 1e-12 * std::abs(k[i - 1])) {
      throw Error("tabulated profile: values must be non-increasing in r");
    }
  }
  RadialProfile p;
  p.kind_ = Kind::Tabulated;
  p.grid_r_ = std::move(r);
  p.grid_k_ = std::move(k);
  return p;
}

double RadialProfile::operator()(double r) const {
  if (r <= 0.0) throw NonPositiveRadius("radial profile evaluated at r <= 0");
  switch (kind_) {
    case Kind::Power:
      return coeff_ * std::pow(r, -alpha_);
    case Kind::Exponential:
      return coeff_ * std::exp(-beta_ * r);
    case Kind::Tabulated: {
      if (r >= grid_r_.back()) return r == grid_r_.back() ? grid_k_.back() : 0.0;
      if (r <= grid_r_.front()) return grid_k_.front();
      // right-continuous step: value of the segment whose left end is <= r
      const auto it = std::upper_bound(grid_r_.begin(), grid_r_.end(), r);
      return grid_k_[static_cast<std::size_t>(it - grid_r_.begin()) - 1];
    }
  }
  return 0.0;
}

// Constant-value segments of a tabulated profile intersected with (a, b):
// k = k_i on [r_i, r_{i+1}) for i = 1..m-1, k_1 below the grid, 0 beyond it.
template <typename Fn>
void RadialProfile::for_each_segment(double a, double b, Fn&& fn) const {
  const std::size_t m = grid_r_.size();
  // first segment whose upper edge exceeds a
  std::size_t start = 0;
  if (a > 0.0) {
    const auto it = std::upper_bound(grid_r_.begin(), grid_r_.end(), a);
    const std::size_t idx = static_cast<std::size_t>(it - grid_r_.begin());
    start = idx == 0 ? 0 : idx - 1;
  }
  for (std::size_t i = start; i + 1 < m; ++i) {
    const double lo = i == 0 ? 0.0 : grid_r_[i];
    const double hi = grid_r_[i + 1];
    const double x0 = std::max(a, lo);
    const double x1 = std::min(b, hi);
    if (x1 > x0) fn(x0, x1, grid_k_[i]);
    if (hi >= b) break;
  }
}

RadialProfile RadialProfile::scaled(double factor) const {
  if (factor <= 0.0) throw Error("profile scale factor must be positive");
  RadialProfile p = *this;
  if (kind_ == Kind::Tabulated) {
    for (double& v : p.grid_k_) v *= factor;
  } else {
    p.coeff_ *= factor;
  }
  return p;
}

double RadialProfile::mass(double a, double b) const {
  if (b <= a) return 0.0;
  switch (kind_) {
    case Kind::Power: {
      // int c r^{-alpha-1} dr = (c/alpha)(a^{-alpha} - b^{-alpha})
      if (a <= 0.0) return kInf;
      const double upper = std::isinf(b) ? 0.0 : std::pow(b, -alpha_);
      return coeff_ / alpha_ * (std::pow(a, -alpha_) - upper);
    }
    case Kind::Exponential: {
      if (a <= 0.0) return kInf;
      const double upper = std::isinf(b) ? 0.0 : exp_integral_e1(beta_ * b);
      return coeff_ * (exp_integral_e1(beta_ * a) - upper);
    }
    case Kind::Tabulated: {
      if (a <= 0.0 && grid_k_.front() > 0.0) return kInf;
      double total = 0.0;
      for_each_segment(a, b, [&](double x0, double x1, double k) {
        if (k > 0.0 && x0 > 0.0) total += k * std::log(x1 / x0);
      });
      return total;
    }
  }
  return 0.0;
}

double RadialProfile::first_moment(double a, double b) const {
  if (b <= a) return 0.0;
  switch (kind_) {
    case Kind::Power: {
      // int c r^{-alpha} dr = c (a^{1-alpha} - b^{1-alpha})/(alpha-1)
      const double lower = a <= 0.0 ? kInf : std::pow(a, 1.0 - alpha_);
      if (std::isinf(lower)) return kInf;
      const double upper = std::isinf(b) ? 0.0 : std::pow(b, 1.0 - alpha_);
      return coeff_ * (lower - upper) / (alpha_ - 1.0);
    }
    case Kind::Exponential: {
      const double lower = std::exp(-beta_ * std::max(a, 0.0));
      const double upper = std::isinf(b) ? 0.0 : std::exp(-beta_ * b);
      return coeff_ / beta_ * (lower - upper);
    }
    case Kind::Tabulated: {
      double total = 0.0;
      for_each_segment(a, b, [&](double x0, double x1, double k) { total += k * (x1 - x0); });
      return total;
    }
  }
  return 0.0;
}

double RadialProfile::second_moment(double a, double b) const {
  if (b <= a) return 0.0;
  switch (kind_) {
    case Kind::Power: {
      // int c r^{1-alpha} dr = c (b^{2-alpha} - a^{2-alpha})/(2-alpha)
      if (std::isinf(b)) return kInf;
      const double lower = a <= 0.0 ? 0.0 : std::pow(a, 2.0 - alpha_);
      return coeff_ * (std::pow(b, 2.0 - alpha_) - lower) / (2.0 - alpha_);
    }
    case Kind::Exponential: {
      // int r e^{-beta r} dr = e^{-beta r} (r/beta + 1/beta^2) at the ends
      auto antider = [&](double r) {
        return -std::exp(-beta_ * r) * (r / beta_ + 1.0 / (beta_ * beta_));
      };
      const double lower = antider(std::max(a, 0.0));
      const double upper = std::isinf(b) ? 0.0 : antider(b);
      return coeff_ * (upper - lower);
    }
    case Kind::Tabulated: {
      double total = 0.0;
      for_each_segment(a, b, [&](double x0, double x1, double k) {
        total += 0.5 * k * (x1 * x1 - x0 * x0);
      });
      return total;
    }
  }
  return 0.0;
}

bool RadialProfile::second_moment_diverges() const { return kind_ == Kind::Power; }

bool RadialProfile::mass_diverges_at_zero() const {
  switch (kind_) {
    case Kind::Power:
      return true;
    case Kind::Exponential:
      return true;  // k(0+) = c > 0, logarithmic blow-up of the intensity
    case Kind::Tabulated:
      return grid_k_.front() > 0.0;
  }
  return false;
}

double RadialProfile::right_limit(double a) const {
  if (a < 0.0) throw NonPositiveRadius("right limit needs a >= 0");
  if (a == 0.0) {
    return kind_ == Kind::Power ? kInf
                                : (kind_ == Kind::Exponential ? coeff_ : grid_k_.front());
  }
  return (*this)(a * (1.0 + 1e-14) + 1e-300);
}

double RadialProfile::support_end() const {
  return kind_ == Kind::Tabulated ? grid_r_.back() : kInf;
}

}  // namespace sdstein
