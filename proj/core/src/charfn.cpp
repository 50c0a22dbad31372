#include "sdstein/charfn.hpp"

#include <cmath>

#include "sdstein/catalog.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/quadrature.hpp"

namespace sdstein {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

// g(r) = k(r)/r and its first derivative, used by the integration-by-parts
// tail of the oscillatory radial integral. Only infinite-support kinds need it.
double g_value(const RadialProfile& p, double r) { return p(r) / r; }

double g_derivative(const RadialProfile& p, double r) {
  switch (p.kind()) {
    case RadialProfile::Kind::Power:
      return -p.coeff() * (p.alpha() + 1.0) * std::pow(r, -p.alpha() - 2.0);
    case RadialProfile::Kind::Exponential:
      return -p.coeff() * std::exp(-p.beta() * r) * (p.beta() / r + 1.0 / (r * r));
    case RadialProfile::Kind::Tabulated:
      return 0.0;  // finite support, no tail
  }
  return 0.0;
}

// Stable evaluations of cos(x)-1 and sin(x)-x; the raw differences lose all
// precision near 0 and the k(r)/r factor amplifies that loss.
double cos_minus_one(double x) {
  const double s = std::sin(0.5 * x);
  return -2.0 * s * s;
}

double sin_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return std::sin(x) - x;
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double abs_tol) {
  AdaptiveOptions opts;
  opts.abs_tol = abs_tol;
  opts.rel_tol = 1e-12;
  opts.max_intervals = 20000;
  const double re = integrate_adaptive([&](double r) { return f(r).real(); }, a, b, opts).value;
  const double im = integrate_adaptive([&](double r) { return f(r).imag(); }, a, b, opts).value;
  return {re, im};
}

}  // namespace

std::complex<double> radial_cf_integral(const RadialProfile& profile, double s,
                                        double abs_tol) {
  if (s == 0.0) return {0.0, 0.0};

  auto integrand = [&](double r) -> Complex {
    const double rs = r * s;
    const Complex osc{cos_minus_one(rs), sin_minus_x(rs)};
    return osc * (profile(r) / r);
  };

  const double support_end = profile.support_end();
  if (std::isfinite(support_end)) {
    return integrate_complex(integrand, 0.0, support_end, abs_tol);
  }

  // Infinite support: adaptive core on (0, R], integration-by-parts tail.
  const double abs_s = std::abs(s);
  double r_cut = std::max(1.0, 8.0 * M_PI / abs_s);
  for (int i = 0; i < 60; ++i) {
    const double remainder = std::abs(g_derivative(profile, r_cut)) / (abs_s * abs_s);
    if (remainder < 0.2 * abs_tol) break;
    r_cut *= 1.6;
  }
  if (std::abs(g_derivative(profile, r_cut)) / (abs_s * abs_s) >= abs_tol) {
    throw DivergentIntegral("radial CF integral: oscillatory tail does not decay");
  }

  const Complex core = integrate_complex(integrand, 0.0, r_cut, abs_tol);

  // int_R^inf e^{irs} g(r) dr  ~  e^{iRs} [ -g(R)/(is) + g'(R)/(is)^2 ],
  // remainder bounded by |g'(R)|/s^2 (g' is monotone for these kinds).
  const Complex is = kI * s;
  const Complex phase = std::exp(kI * (r_cut * s));
  const Complex oscillatory_tail =
      phase * (-g_value(profile, r_cut) / is + g_derivative(profile, r_cut) / (is * is));

  const double mass_tail = profile.mass(r_cut, kInf);
  const double first_tail = profile.first_moment(r_cut, kInf);
  if (!std::isfinite(mass_tail) || !std::isfinite(first_tail)) {
    throw DivergentIntegral("radial CF integral: compensated tail diverges");
  }
  return core + oscillatory_tail - mass_tail - kI * (s * first_tail);
}

std::complex<double> log_cf_quadrature(const SDLawSpec& law, const Vec& xi,
                                       double abs_tol, int sphere_resolution) {
  Complex total = kI * xi.dot(law.mean);
  for (const auto& node : law.levy.direction_nodes(sphere_resolution)) {
    const double s = xi.dot(node.direction);
    if (s == 0.0) continue;
    total += node.weight * radial_cf_integral(*node.profile, s, abs_tol);
  }
  return total;
}

std::complex<double> log_cf(const SDLawSpec& law, const Vec& xi) {
  switch (law.family) {
    case Family::RotInvStable:
      return kI * xi.dot(law.mean) - law.stable_scale * std::pow(xi.norm(), law.stable_alpha);
    case Family::SymmetricStable: {
      const double sigma = catalog::stable_sigma(law.stable_alpha);
      double sum = 0.0;
      for (std::size_t i = 0; i < law.levy.atom_count(); ++i) {
        const auto& atom = law.levy.atom(i);
        sum += atom.weight * law.levy.profile(i).coeff() *
               std::pow(std::abs(xi.dot(atom.direction)), law.stable_alpha);
      }
      return kI * xi.dot(law.mean) - sigma * sum;
    }
    case Family::MultiGamma: {
      Complex total{0.0, 0.0};
      for (int j = 0; j < law.dim(); ++j) {
        total -= law.gamma_shape[j] * std::log(1.0 - kI * (xi[j] / law.gamma_rate[j]));
      }
      return total;
    }
    case Family::ExpProfile: {
      // per atom: theta [ -log(1 - i s/beta) - i s/beta ], plus the mean term
      Complex total = kI * xi.dot(law.mean);
      for (std::size_t i = 0; i < law.levy.atom_count(); ++i) {
        const double s = xi.dot(law.levy.atom(i).direction);
        const double theta = law.gamma_shape[static_cast<int>(i)];
        const double beta = law.gamma_rate[static_cast<int>(i)];
        total += theta * (-std::log(1.0 - kI * (s / beta)) - kI * (s / beta));
      }
      return total;
    }
    case Family::Custom:
      return log_cf_quadrature(law, xi);
  }
  return {0.0, 0.0};
}

std::complex<double> log_cf_ratio(const SDLawSpec& law, const Vec& xi, double t) {
  if (t < 0.0) throw Error("log_cf_ratio: t must be nonnegative");
  if (t == 0.0) return {0.0, 0.0};
  return log_cf(law, xi) - log_cf(law, Vec(std::exp(-t) * xi));
}

}  // namespace sdstein
