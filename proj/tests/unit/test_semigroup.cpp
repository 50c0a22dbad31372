#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/rng.hpp"
#include "sdstein/sampling.hpp"
#include "sdstein/semigroup.hpp"

using namespace sdstein;

namespace {

SmoothTestFunction sine_function() {
  SmoothTestFunction f;
  f.value = [](const Vec& x) { return std::sin(x[0]); };
  f.gradient = [](const Vec& x) { return Vec(Vec::Constant(1, std::cos(x[0]))); };
  f.hessian = [](const Vec& x) { return Mat(Mat::Constant(1, 1, -std::sin(x[0]))); };
  f.m0 = f.m1 = f.m2 = 1.0;
  f.order = 2;
  f.name = "sine";
  return f;
}

SmoothTestFunction linear_function(const Vec& slope, double intercept) {
  SmoothTestFunction f;
  const int d = static_cast<int>(slope.size());
  f.value = [slope, intercept](const Vec& x) { return slope.dot(x) + intercept; };
  f.gradient = [slope](const Vec&) { return slope; };
  f.hessian = [d](const Vec&) { return Mat(Mat::Zero(d, d)); };
  f.m0 = 1e9;  // unbounded, fine for generator tests
  f.m1 = slope.norm();
  f.m2 = 0.0;
  f.name = "linear";
  return f;
}

// closed form: P_t sin(x) = Im(e^{i e^{-t} x} phi_t(1))
double semigroup_sine_closed_form(const SDLawSpec& law, double t, double x) {
  const std::complex<double> phi_t = std::exp(log_cf_ratio(law, Vec::Constant(1, 1.0), t));
  const std::complex<double> rotation =
      std::exp(std::complex<double>(0.0, std::exp(-t) * x));
  return (rotation * phi_t).imag();
}

}  // namespace

TEST_CASE("semigroup at t=0 is the identity", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction h = tanh_ramp_h2(Vec::Constant(1, 1.0), 0.2);
  SemigroupBudget budget;
  budget.n_mc = 500;
  budget.seed = 3;
  const Vec x = Vec::Constant(1, 1.3);
  const ValueWithError p0 = apply_semigroup(law, h, 0.0, x, SemigroupRoute::MonteCarlo, budget);
  CHECK(p0.value == Catch::Approx(h.value(x)).margin(1e-14));
  CHECK(p0.se == 0.0);
}

TEST_CASE("semigroup relaxes to the stationary mean", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction h = tanh_ramp_h2(Vec::Constant(1, 1.0), -0.4);
  SemigroupBudget budget;
  budget.n_mc = 100000;
  budget.seed = 5;
  const ValueWithError p_inf =
      apply_semigroup(law, h, 20.0, Vec::Constant(1, 4.0), SemigroupRoute::MonteCarlo, budget);

  const SampleBatch target = sample_target(law, 100000, 6);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < target.n(); ++i) {
    const double v = h.value(target.points.row(i).transpose());
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / target.n();
  const double se =
      std::sqrt(std::max(0.0, sum2 / target.n() - mean * mean) / target.n());
  const double combined = std::sqrt(se * se + p_inf.se * p_inf.se);
  CHECK(std::abs(p_inf.value - mean) <= 3.0 * combined);
}

TEST_CASE("generator on a linear function keeps only the drift", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const Vec slope = Vec::Constant(1, 0.8);
  const SmoothTestFunction f = linear_function(slope, -0.3);
  for (const double x : {-1.0, 0.5, 2.0}) {
    const ValueWithError got = generator_apply(law, f, Vec::Constant(1, x));
    const double expected = (2.0 - x) * 0.8;  // <EX - x, a>
    CHECK(got.value == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("generator matches Richardson-extrapolated semigroup differences",
          "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction f = sine_function();
  const double x = 1.0;

  GeneratorOptions options;
  options.tol = 1e-7;
  const ValueWithError gen = generator_apply(law, f, Vec::Constant(1, x), options);

  // oracle: difference quotients of the exact P_t sin with two Richardson
  // levels, (4 R(t/2) - R(t))/3 with R(t) = 2 D(t/2) - D(t)
  auto quotient = [&](double t) {
    return (semigroup_sine_closed_form(law, t, x) - std::sin(x)) / t;
  };
  const double r1 = 2.0 * quotient(0.01) - quotient(0.02);
  const double r2 = 2.0 * quotient(0.005) - quotient(0.01);
  const double oracle = (4.0 * r2 - r1) / 3.0;
  CHECK(gen.value == Catch::Approx(oracle).margin(5e-3));
}

TEST_CASE("drift term vanishes at the mean for even functions", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  SmoothTestFunction f;
  f.value = [](const Vec& x) { return std::cos(x[0] - 2.0); };
  f.gradient = [](const Vec& x) { return Vec(Vec::Constant(1, -std::sin(x[0] - 2.0))); };
  f.hessian = [](const Vec& x) { return Mat(Mat::Constant(1, 1, -std::cos(x[0] - 2.0))); };
  f.m0 = f.m1 = f.m2 = 1.0;
  f.order = 2;
  CHECK(f.gradient(law.mean).norm() < 1e-15);  // structural: drift term is zero

  GeneratorOptions options;
  options.tol = 1e-7;
  const ValueWithError gen = generator_apply(law, f, law.mean, options);
  auto quotient = [&](double t) {
    // P_t cos(x-2) at x = 2: Re(e^{i(2 e^{-t} - 2)} phi_t(1))
    const std::complex<double> phi_t =
        std::exp(log_cf_ratio(law, Vec::Constant(1, 1.0), t));
    const std::complex<double> rot =
        std::exp(std::complex<double>(0.0, std::exp(-t) * 2.0 - 2.0));
    return ((rot * phi_t).real() - 1.0) / t;
  };
  const double r1 = 2.0 * quotient(0.01) - quotient(0.02);
  const double r2 = 2.0 * quotient(0.005) - quotient(0.01);
  CHECK(gen.value == Catch::Approx((4.0 * r2 - r1) / 3.0).margin(5e-3));
}

TEST_CASE("commutation: d_j P_t h = e^{-t} P_t d_j h", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction h = tanh_ramp_h2(Vec::Constant(1, 1.3), 0.1);
  const double t = 0.8;
  const SampleBatch batch = sample_mu_t(law, t, 20000, 9);
  const double et = std::exp(-t);
  RngStream rng(11, "commutation");
  for (int rep = 0; rep < 10; ++rep) {
    const double x = rng.uniform(-2.0, 4.0);
    const double step = 1e-4;
    auto p_t = [&](double xx) {
      double sum = 0.0;
      for (int i = 0; i < batch.n(); ++i) {
        sum += h.value(Vec(batch.points.row(i).transpose() + Vec::Constant(1, et * xx)));
      }
      return sum / batch.n();
    };
    const double lhs = (p_t(x + step) - p_t(x - step)) / (2.0 * step);
    double rhs = 0.0;
    for (int i = 0; i < batch.n(); ++i) {
      rhs += h.gradient(
          Vec(batch.points.row(i).transpose() + Vec::Constant(1, et * x)))[0];
    }
    rhs *= et / batch.n();
    CHECK(std::abs(lhs - rhs) < 1e-3);
  }
}

TEST_CASE("constant test functions solve trivially", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  SmoothTestFunction h;
  h.value = [](const Vec&) { return 0.3; };
  h.gradient = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  h.hessian = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
  h.m0 = 0.3;
  h.m1 = h.m2 = 0.0;
  h.order = 2;

  SteinSolveBudget budget;
  budget.n_mc = 2000;
  budget.n_target = 5000;
  budget.seed = 13;
  const SteinSolution sol = solve_stein(law, h, budget);
  const Vec x = Vec::Constant(1, 1.0);
  CHECK(std::abs(sol.value(x)) < 1e-12);
  CHECK(sol.gradient(x).norm() < 1e-12);
  CHECK(std::abs(sol.hessian(x)(0, 0)) < 1e-12);

  const ValueWithError res = stein_residual(law, sol, x);
  CHECK(std::abs(res.value) < 1e-12);
}

TEST_CASE("stein solution satisfies the derivative bounds", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction h = tanh_ramp_h2(Vec::Constant(1, 1.0), 0.25);
  SteinSolveBudget budget;
  budget.n_mc = 6000;
  budget.n_target = 40000;
  budget.seed = 17;
  const SteinSolution sol = solve_stein(law, h, budget);

  RngStream rng(19, "bounds-grid");
  for (int i = 0; i < 20; ++i) {
    const Vec x = Vec::Constant(1, rng.uniform(-3.0, 7.0));
    const Mat gblocks = sol.gradient_blocks(x);
    const double g = gblocks.rowwise().mean()(0);
    const Vec se = sol.gradient_se(x);
    CHECK(std::abs(g) <= 1.0 + 2.0 * se[0] + 1e-9);

    const Mat hblocks = sol.hessian_blocks(x);
    const double hess = hblocks.rowwise().mean()(0);
    const double hvar =
        (hblocks.row(0).array() - hess).square().sum() / (hblocks.cols() - 1);
    const double hse = std::sqrt(hvar / hblocks.cols());
    CHECK(std::abs(hess) <= 0.5 + 2.0 * hse + 1e-9);
  }
}

TEST_CASE("stein residual is small at probe points", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction h = tanh_ramp(Vec::Constant(1, 1.0), 0.0, 1.0, 0.5);
  SteinSolveBudget budget;
  budget.n_mc = 10000;
  budget.n_target = 50000;
  budget.tol = 1e-2;
  budget.seed = 23;
  const SteinSolution sol = solve_stein(law, h, budget);
  GeneratorOptions options;
  options.tol = 2e-3;
  for (const double p : {0.5, 2.0}) {
    const ValueWithError res = stein_residual(law, sol, Vec::Constant(1, p), options);
    INFO("x=" << p << " residual=" << res.value << " se=" << res.se);
    CHECK(std::abs(res.value) <= 3.0 * (budget.tol + res.se));
  }
}

TEST_CASE("characterization identity under the target law", "[semigroup]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SmoothTestFunction f = tanh_ramp_h2(Vec::Constant(1, 1.0), 0.3);
  const CharacterizationEstimate est = characterization_identity(law, f, 20000, 29);
  CHECK(std::abs(est.gap()) <= 3.0 * est.combined_se());
}

TEST_CASE("fourier and monte carlo routes agree", "[semigroup]") {
  // d = 1, gamma target
  {
    const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
    const SmoothTestFunction h = compact_bump(Vec::Constant(1, 1.0), 3.0);
    const Vec x = Vec::Constant(1, 1.5);
    const double t = 0.7;
    SemigroupBudget budget;
    budget.n_mc = 200000;
    budget.seed = 31;
    const ValueWithError mc = apply_semigroup(law, h, t, x, SemigroupRoute::MonteCarlo, budget);
    const ValueWithError fr = apply_semigroup(law, h, t, x, SemigroupRoute::Fourier, budget);
    CHECK(std::abs(mc.value - fr.value) <= 3.0 * mc.se + 2e-3);
  }
  // d = 2, multivariate gamma
  {
    Vec shape(2), rate(2);
    shape << 1.0, 2.0;
    rate << 1.0, 1.0;
    const SDLawSpec law = catalog::multi_gamma(shape, rate);
    Vec center(2);
    center << 1.0, 2.0;
    const SmoothTestFunction h = compact_bump(center, 3.0);
    Vec x(2);
    x << 0.5, 1.5;
    const double t = 0.5;
    SemigroupBudget budget;
    budget.n_mc = 200000;
    budget.seed = 37;
    const ValueWithError mc = apply_semigroup(law, h, t, x, SemigroupRoute::MonteCarlo, budget);
    const ValueWithError fr = apply_semigroup(law, h, t, x, SemigroupRoute::Fourier, budget);
    CHECK(std::abs(mc.value - fr.value) <= 3.0 * mc.se + 5e-3);
  }
  // the fourier route refuses unbounded support
  {
    const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
    const SmoothTestFunction h = tanh_ramp_h2(Vec::Constant(1, 1.0), 0.0);
    CHECK_THROWS_AS(apply_semigroup(law, h, 0.5, Vec::Zero(1), SemigroupRoute::Fourier),
                    RouteUnavailable);
  }
}
