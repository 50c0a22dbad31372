#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/quadrature.hpp"

using namespace sdstein;

namespace {

// independent oracle: 1-d inversion by adaptive quadrature,
// q_t(x) = (1/pi) int_0^inf cos(xi x) exp(-C (1-e^{-alpha t}) xi^alpha) d xi
double stable_density_quadrature(double x, double alpha, double scale) {
  AdaptiveOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-10;
  opts.max_intervals = 20000;
  const double cutoff = std::pow(40.0 / scale, 1.0 / alpha);
  return integrate_adaptive(
             [&](double xi) {
               return std::cos(xi * x) * std::exp(-scale * std::pow(xi, alpha));
             },
             0.0, cutoff, opts)
             .value /
         M_PI;
}

}  // namespace

TEST_CASE("stable density inversion matches oscillatory quadrature", "[density]") {
  const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
  const double t = 3.0;
  const DensityGrid grid = density_by_inversion(law, t);
  CHECK(std::abs(grid.total_mass() - 1.0) <= 1e-3);
  CHECK(grid.min_value() >= -1e-8);

  const double scale = law.stable_scale * (1.0 - std::exp(-1.5 * t));
  double worst = 0.0;
  for (int k = 0; k < grid.points_per_axis(); k += 5) {
    const Vec x = grid.point({k});
    if (std::abs(x[0]) > 6.0) continue;  // compare on the bulk
    const double oracle = stable_density_quadrature(x[0], 1.5, scale);
    worst = std::max(worst, std::abs(grid.value({k}) - oracle));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("symmetric law gives a symmetric density grid", "[density]") {
  const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
  const DensityGrid grid = density_by_inversion(law, 1.0);
  const int n = grid.points_per_axis();
  for (int k = 1; k < n; ++k) {
    CHECK(std::abs(grid.value({k}) - grid.value({n - k})) < 1e-8);
  }
}

TEST_CASE("two-dimensional inversion factorises for a product law", "[density]") {
  // symmetric stable with axis atoms is the product of two 1-d laws with
  // C = coeff * sigma_alpha / 2 each
  const double alpha = 1.5;
  std::vector<SphericalAtom> atoms;
  for (const double s : {1.0, -1.0}) {
    for (int j = 0; j < 2; ++j) {
      Vec dir = Vec::Zero(2);
      dir[j] = s;
      atoms.push_back({dir, 0.25});
    }
  }
  const SDLawSpec law2 = catalog::symmetric_stable(alpha, atoms);
  const double c_axis = catalog::stable_sigma(alpha) / 2.0;
  const SDLawSpec law1 = catalog::rot_inv_stable(1, alpha, c_axis);

  const double t = 2.0;
  DensityGridParams p2;
  p2.points_per_axis = 128;
  const DensityGrid grid2 = density_by_inversion(law2, t, p2);
  DensityGridParams p1;
  p1.points_per_axis = 512;
  const DensityGrid grid1 = density_by_inversion(law1, t, p1);

  auto interp1 = [&](double x) {
    const double pos = (x - grid1.point({0})[0]) / grid1.dx();
    const int k = static_cast<int>(std::floor(pos));
    REQUIRE(k >= 0);
    REQUIRE(k + 1 < grid1.points_per_axis());
    const double w = pos - k;
    return (1.0 - w) * grid1.value({k}) + w * grid1.value({k + 1});
  };

  double worst = 0.0;
  for (int a = 40; a < 88; a += 6) {
    for (int b = 40; b < 88; b += 6) {
      const Vec x = grid2.point({a, b});
      const double product = interp1(x[0]) * interp1(x[1]);
      worst = std::max(worst, std::abs(grid2.value({a, b}) - product));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("non-vanishing CF is rejected", "[density]") {
  // gamma mu_t keeps an atom (the no-jump event), |phi_t| does not decay
  const SDLawSpec law = catalog::gamma1d(2.0, 1.0);
  CHECK_THROWS_AS(density_by_inversion(law, 1.0), NonIntegrableCF);
}

TEST_CASE("coarse lattices are rejected", "[density]") {
  const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
  DensityGridParams params;
  params.points_per_axis = 8;
  CHECK_THROWS_AS(density_by_inversion(law, 1.0, params), GridTooCoarse);
}

TEST_CASE("density gradient L1 diagnostic is finite for stable laws", "[density]") {
  const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
  const double g = density_gradient_l1(law, 1.0, 0);
  CHECK(std::isfinite(g));
  CHECK(g > 0.1);  // a unimodal density has |dq| mass ~ 2 max q
}

TEST_CASE("density grid CSV export carries coordinates and metadata", "[density]") {
  const SDLawSpec law = catalog::rot_inv_stable(1, 1.5);
  DensityGridParams params;
  params.points_per_axis = 64;
  const DensityGrid grid = density_by_inversion(law, 2.0, params);
  const std::string base = std::filesystem::temp_directory_path() / "sdstein_grid";
  grid.write_csv(base);

  std::ifstream csv(base + ".csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x1,density");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 64);

  std::ifstream side(base + ".json");
  nlohmann::json meta;
  side >> meta;
  CHECK(meta.at("points_per_axis") == 64);
  CHECK(meta.at("t") == 2.0);
  CHECK(std::abs(meta.at("total_mass").get<double>() - 1.0) < 1e-3);
}
