#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"
#include "sdstein/rng.hpp"

using namespace sdstein;
using Complex = std::complex<double>;

TEST_CASE("multivariate gamma log CF at a frozen point", "[charfn]") {
  Vec shape(2), rate(2);
  shape << 1.0, 1.0;
  rate << 1.0, 1.0;
  const SDLawSpec law = catalog::multi_gamma(shape, rate);
  Vec xi(2);
  xi << 1.0, 0.0;
  // oracle: direct complex evaluation of -log(1 - i)
  const Complex oracle = -std::log(Complex(1.0, -1.0));
  const Complex got = log_cf(law, xi);
  CHECK(std::abs(got - oracle) < 1e-14);
  CHECK(got.real() == Catch::Approx(-0.3465736).margin(1e-7));
  CHECK(got.imag() == Catch::Approx(0.7853982).margin(1e-7));
}

TEST_CASE("log CF vanishes at the origin", "[charfn]") {
  for (const auto& law : catalog::standard_catalog()) {
    CHECK(std::abs(log_cf(law, Vec::Zero(law.dim()))) < 1e-14);
  }
}

TEST_CASE("rotationally invariant stable has the power-law log CF", "[charfn]") {
  const SDLawSpec law = catalog::rot_inv_stable(2, 1.5);
  RngStream rng(3, "stable-cf");
  for (int i = 0; i < 20; ++i) {
    Vec xi(2);
    xi << rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0);
    const Complex expected(-law.stable_scale * std::pow(xi.norm(), 1.5), 0.0);
    CHECK(std::abs(log_cf(law, xi) - expected) < 1e-12);
  }
  // with an explicit C override the scale is exactly C
  const SDLawSpec unit = catalog::rot_inv_stable(1, 1.5, 1.0);
  Vec xi1 = Vec::Constant(1, 2.0);
  CHECK(log_cf(unit, xi1).real() == Catch::Approx(-std::pow(2.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("quadrature route agrees with every closed form", "[charfn]") {
  auto laws = catalog::standard_catalog();
  RngStream rng(5, "cf-quad");
  for (const auto& law : laws) {
    const int reps = law.levy.is_rotationally_invariant() && law.dim() > 1 ? 3 : 6;
    for (int i = 0; i < reps; ++i) {
      Vec xi(law.dim());
      for (int j = 0; j < law.dim(); ++j) xi[j] = rng.uniform(-4.0, 4.0);
      const Complex closed = log_cf(law, xi);
      const Complex quad = log_cf_quadrature(law, xi, 1e-10);
      INFO(law.id << " xi0=" << xi[0]);
      CHECK(std::abs(closed - quad) < 1e-5);
    }
  }
}

TEST_CASE("hermitian symmetry", "[charfn]") {
  RngStream rng(7, "cf-herm");
  for (const auto& law : catalog::standard_catalog()) {
    for (int i = 0; i < 10; ++i) {
      Vec xi(law.dim());
      for (int j = 0; j < law.dim(); ++j) xi[j] = rng.uniform(-3.0, 3.0);
      const Complex a = log_cf(law, xi);
      const Complex b = log_cf(law, Vec(-xi));
      CHECK(std::abs(a - std::conj(b)) < 1e-12);
    }
  }
}

TEST_CASE("gradient of log CF at zero is i times the mean", "[charfn]") {
  for (const auto& law : catalog::standard_catalog()) {
    const double step = 1e-5;
    for (int j = 0; j < law.dim(); ++j) {
      Vec xp = Vec::Zero(law.dim()), xm = Vec::Zero(law.dim());
      xp[j] += step;
      xm[j] -= step;
      const Complex fd = (log_cf(law, xp) - log_cf(law, xm)) / (2.0 * step);
      INFO(law.id << " coordinate " << j);
      CHECK(std::abs(fd - Complex(0.0, law.mean[j])) < 1e-6);
    }
  }
}

TEST_CASE("CF ratio properties", "[charfn]") {
  RngStream rng(9, "cf-ratio");
  for (const auto& law : catalog::standard_catalog()) {
    Vec xi(law.dim());
    for (int j = 0; j < law.dim(); ++j) xi[j] = rng.uniform(-2.0, 2.0);
    CHECK(std::abs(log_cf_ratio(law, xi, 0.0)) == 0.0);
    for (const double t : {0.3, 1.0, 4.0}) {
      CHECK(std::exp(log_cf_ratio(law, xi, t).real()) <= 1.0 + 1e-10);
    }
  }

  // stable: log phi_t = -C (1 - e^{-alpha t}) ||xi||^alpha
  const SDLawSpec stable = catalog::rot_inv_stable(1, 1.5);
  Vec xi = Vec::Constant(1, 1.3);
  for (const double t : {0.2, 1.0, 3.0}) {
    const double expected =
        -stable.stable_scale * (1.0 - std::exp(-1.5 * t)) * std::pow(1.3, 1.5);
    CHECK(log_cf_ratio(stable, xi, t).real() == Catch::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(log_cf_ratio(stable, xi, t).imag()) < 1e-14);
  }

  // multivariate gamma: e^{-t sum alpha} <= |phi_t| <= 1
  Vec shape(2), rate(2);
  shape << 1.0, 2.0;
  rate << 1.0, 1.0;
  const SDLawSpec mg = catalog::multi_gamma(shape, rate);
  for (const double t : {0.3, 1.0, 2.5}) {
    for (int i = 0; i < 10; ++i) {
      Vec z(2);
      z << rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0);
      const double mod = std::exp(log_cf_ratio(mg, z, t).real());
      CHECK(mod <= 1.0 + 1e-12);
      CHECK(mod >= std::exp(-t * 3.0) - 1e-12);
    }
  }
}
