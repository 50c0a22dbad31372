#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sdstein/errors.hpp"
#include "sdstein/radial_profile.hpp"
#include "sdstein/rng.hpp"

using namespace sdstein;

namespace {

// independent oracle: midpoint Riemann sum on a fine grid
double riemann(const std::function<double(double)>& f, double a, double b, int n = 2000000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("profile evaluation matches the closed forms", "[profile]") {
  const RadialProfile power = RadialProfile::power(1.0, 1.5);
  CHECK(power(2.0) == Catch::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  CHECK(power(2.0) == Catch::Approx(0.3535534).margin(1e-7));

  const RadialProfile expo = RadialProfile::exponential(1.0, 1.0);
  CHECK(expo(0.5) == Catch::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(expo(0.5) == Catch::Approx(0.6065307).margin(1e-7));

  CHECK_THROWS_AS(power(0.0), NonPositiveRadius);
  CHECK_THROWS_AS(expo(-1.0), NonPositiveRadius);
}

TEST_CASE("profiles are non-increasing and power profiles scale exactly", "[profile]") {
  RngStream rng(5, "profile-prop");
  const RadialProfile profiles[] = {
      RadialProfile::power(0.7, 1.3), RadialProfile::exponential(2.0, 0.5),
      RadialProfile::tabulated({0.1, 0.5, 1.0, 4.0}, {3.0, 2.0, 0.5, 0.1})};
  for (const auto& k : profiles) {
    for (int i = 0; i < 500; ++i) {
      const double r = std::exp(rng.uniform(-6.0, 3.0));
      const double s = r + std::exp(rng.uniform(-6.0, 2.0));
      CHECK(k(s) <= k(r) + 1e-12);
    }
  }
  const RadialProfile power = RadialProfile::power(1.0, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double r = std::exp(rng.uniform(-4.0, 4.0));
    const double c = std::exp(rng.uniform(-2.0, 2.0));
    CHECK(power(c * r) == Catch::Approx(std::pow(c, -1.5) * power(r)).epsilon(1e-12));
  }
}

TEST_CASE("closed-form radial functionals match Riemann sums", "[profile]") {
  const RadialProfile power = RadialProfile::power(0.8, 1.6);
  const RadialProfile expo = RadialProfile::exponential(2.0, 1.3);
  struct Case {
    const RadialProfile* k;
    double a, b;
  };
  for (const auto& c : {Case{&power, 0.2, 3.0}, Case{&expo, 0.1, 6.0},
                        Case{&expo, 1.0, 40.0}, Case{&power, 1.0, 200.0}}) {
    const auto& k = *c.k;
    CHECK(k.mass(c.a, c.b) ==
          Catch::Approx(riemann([&](double r) { return k(r) / r; }, c.a, c.b))
              .epsilon(1e-6));
    CHECK(k.first_moment(c.a, c.b) ==
          Catch::Approx(riemann([&](double r) { return k(r); }, c.a, c.b)).epsilon(1e-6));
    CHECK(k.second_moment(c.a, c.b) ==
          Catch::Approx(riemann([&](double r) { return r * k(r); }, c.a, c.b))
              .epsilon(1e-6));
  }
}

TEST_CASE("tabulated profiles are right-continuous steps with exact sums", "[profile]") {
  const RadialProfile tab = RadialProfile::tabulated({1.0, 2.0, 4.0}, {3.0, 1.0, 0.5});
  CHECK(tab(0.5) == 3.0);   // extended left
  CHECK(tab(1.0) == 3.0);   // value on [1, 2)
  CHECK(tab(1.999) == 3.0);
  CHECK(tab(2.0) == 1.0);   // right-continuous jump
  CHECK(tab(3.999) == 1.0);
  CHECK(tab(5.0) == 0.0);   // beyond the grid

  // exact step integrals: k = 3 on (0,2), 1 on [2,4), 0 beyond
  CHECK(tab.first_moment(0.0, kInf) == Catch::Approx(3.0 * 2.0 + 1.0 * 2.0).epsilon(1e-14));
  CHECK(tab.second_moment(0.0, kInf) ==
        Catch::Approx(0.5 * 3.0 * 4.0 + 0.5 * 1.0 * (16.0 - 4.0)).epsilon(1e-14));
  CHECK(tab.mass(1.0, 4.0) ==
        Catch::Approx(3.0 * std::log(2.0) + 1.0 * std::log(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(RadialProfile::tabulated({1.0, 2.0}, {1.0, 2.0}), Error);
  CHECK_NOTHROW(RadialProfile::tabulated({1.0, 2.0}, {1.0, 2.0}, /*validate=*/false));
  CHECK_THROWS_AS(RadialProfile::tabulated({2.0, 1.0}, {2.0, 1.0}), Error);
}

TEST_CASE("divergence flags", "[profile]") {
  const RadialProfile power = RadialProfile::power(1.0, 1.5);
  CHECK(power.second_moment_diverges());
  CHECK(power.mass_diverges_at_zero());
  CHECK(std::isinf(power.first_moment(0.0, 1.0)));
  CHECK(std::isinf(power.mass(0.0, 1.0)));

  const RadialProfile expo = RadialProfile::exponential(1.0, 2.0);
  CHECK_FALSE(expo.second_moment_diverges());
  CHECK(expo.mass_diverges_at_zero());
  CHECK(std::isfinite(expo.second_moment(0.0, kInf)));
}
