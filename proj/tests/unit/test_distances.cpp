#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "sdstein/catalog.hpp"
#include "sdstein/distances.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/rng.hpp"

using namespace sdstein;

TEST_CASE("identical clouds are at distance zero, order independent", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SampleBatch a = sample_target(law, 200, 3);
  SampleBatch b = a;
  // reverse the rows
  for (int i = 0; i < a.n(); ++i) b.points.row(i) = a.points.row(a.n() - 1 - i);
  CHECK(wasserstein_empirical(a, b, 1) <= 1e-12);
  CHECK(wasserstein_empirical(a, b, 2) <= 1e-12);

  const TestFunctionDictionary dict = TestFunctionDictionary::standard(1, 8, 5);
  CHECK(smooth_wasserstein_lb(a, b, 1, dict) <= 1e-12);
}

TEST_CASE("one-dimensional transport equals the sorted coupling", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  for (const int p : {1, 2}) {
    const SampleBatch a = sample_target(law, 256, 7);
    const SampleBatch b = sample_mu_t(law, 0.9, 256, 8);
    // oracle: sort both samples and couple in order
    std::vector<double> xs(a.points.data(), a.points.data() + 256);
    std::vector<double> ys(b.points.data(), b.points.data() + 256);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double oracle = 0.0;
    for (int i = 0; i < 256; ++i) oracle += std::pow(std::abs(xs[i] - ys[i]), p);
    oracle = std::pow(oracle / 256.0, 1.0 / p);
    CHECK(wasserstein_empirical(a, b, p) == Catch::Approx(oracle).margin(1e-10));
  }
}

TEST_CASE("permutation invariance of the transport distance", "[distances]") {
  const SDLawSpec law = catalog::rot_inv_stable(2, 1.5);
  const SampleBatch a = sample_target(law, 128, 9);
  const SampleBatch b = sample_target(law, 128, 10);
  const double base = wasserstein_empirical(a, b, 1);
  SampleBatch shuffled = a;
  RngStream rng(11, "shuffle");
  for (int i = 127; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u32() % (i + 1));
    shuffled.points.row(i).swap(shuffled.points.row(j));
  }
  CHECK(wasserstein_empirical(shuffled, b, 1) == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("triangle inequality and p-ordering", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SampleBatch a = sample_target(law, 128, 13);
  const SampleBatch b = sample_mu_t(law, 0.5, 128, 14);
  const SampleBatch c = sample_mu_t(law, 2.0, 128, 15);
  for (const int p : {1, 2}) {
    const double ab = wasserstein_empirical(a, b, p);
    const double bc = wasserstein_empirical(b, c, p);
    const double ac = wasserstein_empirical(a, c, p);
    CHECK(ac <= ab + bc + 1e-10);
  }
  CHECK(wasserstein_empirical(a, b, 1) <= wasserstein_empirical(a, b, 2) + 1e-10);
}

TEST_CASE("dictionary bracket sits under the transport distance", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const TestFunctionDictionary dict = TestFunctionDictionary::standard(1, 32, 17);
  const SampleBatch a = sample_target(law, 512, 19);
  const SampleBatch b = sample_mu_t(law, 1.0, 512, 20);
  const double lb2 = smooth_wasserstein_lb(a, b, 2, dict);
  const double lb1 = smooth_wasserstein_lb(a, b, 1, dict);
  const double w1 = wasserstein_empirical(a, b, 1);
  const double w2 = wasserstein_empirical(a, b, 2);
  CHECK(lb2 <= lb1 + 1e-10);
  CHECK(lb1 <= w1 + 1e-10);
  CHECK(w1 <= w2 + 1e-10);
  CHECK(lb1 > 0.0);
}

TEST_CASE("single-member dictionaries give the plain mean gap", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const TestFunctionDictionary dict = TestFunctionDictionary::standard(1, 1, 21);
  REQUIRE(dict.members().size() == 1);
  const SampleBatch a = sample_target(law, 300, 23);
  const SampleBatch b = sample_mu_t(law, 0.8, 300, 24);
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < 300; ++i) {
    ma += dict.members()[0].value(a.points.row(i).transpose());
    mb += dict.members()[0].value(b.points.row(i).transpose());
  }
  const double expected = std::abs(ma - mb) / 300.0;
  CHECK(smooth_wasserstein_lb(a, b, 1, dict) == Catch::Approx(expected).margin(1e-14));
}

TEST_CASE("size and dictionary guards", "[distances]") {
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  const SampleBatch a = sample_target(law, 32, 25);
  const SampleBatch b = sample_target(law, 64, 26);
  CHECK_THROWS_AS(wasserstein_empirical(a, b, 1), SizeMismatch);

  SampleBatch big_a = sample_target(law, 100, 27);
  big_a.points = Mat::Zero(5000, 1);
  SampleBatch big_b = big_a;
  CHECK_THROWS_AS(wasserstein_empirical(big_a, big_b, 1), SizeTooLarge);

  const TestFunctionDictionary dict = TestFunctionDictionary::standard(1, 4, 29);
  // no member certifies an absurd order
  CHECK_THROWS_AS(smooth_wasserstein_lb(a, a, 7, dict), EmptyDictionary);
}

TEST_CASE("smoothing curve decays and matches the stable coupling oracle",
          "[distances]") {
  const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0, 4.0};

  // gamma law: fitted slope is negative, envelope finite
  {
    const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
    const SmoothingCurve curve = smoothing_curve(law, grid, 512, 31);
    REQUIRE(curve.points.size() == grid.size());
    CHECK(curve.fitted_slope < 0.0);
    CHECK(std::isfinite(curve.c_hat));
    CHECK(curve.c_hat > 0.0);
    CHECK(curve.paper_rate == Catch::Approx(1.0 / 8.0));
    for (const auto& pt : curve.points) {
      CHECK(pt.w1 <= curve.c_hat * std::exp(-curve.paper_rate * pt.t) + 1e-12);
    }
  }

  // stable law: the scaling-coupling oracle tracks the curve
  {
    const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
    const SmoothingCurve curve = smoothing_curve(law, grid, 512, 33);
    for (const auto& pt : curve.points) {
      INFO("t=" << pt.t);
      CHECK(std::abs(pt.w1 - pt.coupling_oracle) <=
            3.0 * (pt.se + curve.self_floor));
    }
    const std::string path =
        std::filesystem::temp_directory_path() / "sdstein_curve.csv";
    curve.write_csv(path);
    CHECK(std::filesystem::file_size(path) > 100);
  }
}
