#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdstein/assignment.hpp"
#include "sdstein/rng.hpp"

using namespace sdstein;

namespace {

// oracle: exhaustive permutation search
double brute_force(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("assignment matches brute force on random instances", "[assignment]") {
  RngStream rng(31, "lap-test");
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 7;
    Mat cost(n, n);
    const bool integer_costs = trial % 3 == 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cost(i, j) = integer_costs ? std::floor(rng.uniform(0.0, 5.0)) : rng.uniform();
      }
    }
    const AssignmentResult res = solve_assignment(cost);
    // valid permutation
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
      REQUIRE(res.row_to_col[i] >= 0);
      REQUIRE(res.row_to_col[i] < n);
      REQUIRE_FALSE(used[res.row_to_col[i]]);
      used[res.row_to_col[i]] = true;
    }
    REQUIRE(res.cost == Catch::Approx(brute_force(cost)).margin(1e-10));
  }
}

TEST_CASE("assignment finds zero-cost diagonals", "[assignment]") {
  const int n = 64;
  Mat cost = Mat::Ones(n, n);
  cost.diagonal().setZero();
  const AssignmentResult res = solve_assignment(cost);
  CHECK(res.cost == 0.0);
}

TEST_CASE("assignment on a larger instance stays consistent with potentials",
          "[assignment]") {
  RngStream rng(37, "lap-large");
  const int n = 256;
  Mat cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
  }
  const AssignmentResult res = solve_assignment(cost);
  // local optimality: no 2-swap improves the solution
  for (int trial = 0; trial < 20000; ++trial) {
    const int i = static_cast<int>(rng.next_u32() % n);
    const int k = static_cast<int>(rng.next_u32() % n);
    if (i == k) continue;
    const int ji = res.row_to_col[i], jk = res.row_to_col[k];
    CHECK(cost(i, ji) + cost(k, jk) <= cost(i, jk) + cost(k, ji) + 1e-12);
  }
}

TEST_CASE("degenerate costs with duplicate points stay exact", "[assignment]") {
  // duplicate rows and columns produce the tie patterns that once cycled the
  // row-reduction stage on real-valued costs
  RngStream rng(41, "lap-degenerate");
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = (i % 2 == 0) ? 0.0 : rng.uniform();
      ys[i] = (i % 3 == 0) ? 0.0 : rng.uniform();
    }
    Mat cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cost(i, j) = (xs[i] - ys[j]) * (xs[i] - ys[j]);
      }
    }
    const AssignmentResult res = solve_assignment(cost);
    REQUIRE(res.cost == Catch::Approx(brute_force(cost)).margin(1e-12));
  }
}
