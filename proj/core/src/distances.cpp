#include "sdstein/distances.hpp"

#include <cmath>
#include <fstream>

#include "sdstein/assignment.hpp"
#include "sdstein/errors.hpp"

namespace sdstein {

namespace {

Mat cost_matrix(const SampleBatch& a, const SampleBatch& b, int p) {
  const int n = a.n();
  Mat cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double dist2 = (a.points.row(i) - b.points.row(j)).squaredNorm();
      cost(i, j) = p == 2 ? dist2 : std::sqrt(dist2);
    }
  }
  return cost;
}

SampleBatch slice(const SampleBatch& batch, int from, int count) {
  SampleBatch out = batch;
  out.points = batch.points.middleRows(from, count).eval();
  return out;
}

}  // namespace

double wasserstein_empirical(const SampleBatch& a, const SampleBatch& b, int p) {
  if (a.n() != b.n()) throw SizeMismatch("wasserstein_empirical: unequal batch sizes");
  if (a.n() > 4096) throw SizeTooLarge("wasserstein_empirical: n must be <= 4096");
  if (a.dim() != b.dim()) throw SizeMismatch("wasserstein_empirical: dimension mismatch");
  if (p != 1 && p != 2) throw Error("wasserstein_empirical: p must be 1 or 2");
  const AssignmentResult res = solve_assignment(cost_matrix(a, b, p));
  const double mean_cost = res.cost / a.n();
  return p == 2 ? std::sqrt(mean_cost) : mean_cost;
}

double smooth_wasserstein_lb(const SampleBatch& a, const SampleBatch& b, int r,
                             const TestFunctionDictionary& dictionary) {
  return smooth_wasserstein_lb_detail(a, b, r, dictionary).bound;
}

SmoothLbDetail smooth_wasserstein_lb_detail(const SampleBatch& a, const SampleBatch& b,
                                            int r,
                                            const TestFunctionDictionary& dictionary) {
  const auto members = dictionary.certified(r);
  if (members.empty()) throw EmptyDictionary("no dictionary members certify H_r");
  SmoothLbDetail best;
  for (const auto* h : members) {
    double mean_a = 0.0, mean_b = 0.0, sq_a = 0.0, sq_b = 0.0;
    for (int i = 0; i < a.n(); ++i) {
      const double v = h->value(a.points.row(i).transpose());
      mean_a += v;
      sq_a += v * v;
    }
    for (int i = 0; i < b.n(); ++i) {
      const double v = h->value(b.points.row(i).transpose());
      mean_b += v;
      sq_b += v * v;
    }
    mean_a /= a.n();
    mean_b /= b.n();
    const double gap = std::abs(mean_a - mean_b);
    if (gap > best.bound) {
      const double var_a = std::max(0.0, sq_a / a.n() - mean_a * mean_a) / a.n();
      const double var_b = std::max(0.0, sq_b / b.n() - mean_b * mean_b) / b.n();
      best.bound = gap;
      best.argmax_se = std::sqrt(var_a + var_b);
      best.argmax_name = h->name;
    }
  }
  return best;
}

SmoothingCurve smoothing_curve(const SDLawSpec& law, const std::vector<double>& t_grid,
                               int n, std::uint64_t seed, int se_blocks) {
  if (t_grid.empty()) throw Error("smoothing_curve: empty t grid");
  SmoothingCurve curve;
  curve.paper_rate = 1.0 / (std::pow(2.0, law.dim() + 1) * (law.dim() + 1));

  const SampleBatch target = sample_target(law, n, seed);
  const bool stable =
      law.family == Family::RotInvStable || law.family == Family::SymmetricStable;

  double mean_norm = 0.0;
  for (int i = 0; i < n; ++i) mean_norm += target.points.row(i).norm();
  mean_norm /= n;

  // two-sample floor of the W1 estimator: the law against itself
  {
    const SampleBatch second = sample_target(law, n, seed + 7777);
    curve.self_floor =
        wasserstein_empirical(slice(target, 0, n / 2), slice(second, 0, n / 2), 1);
  }

  for (const double t : t_grid) {
    const SampleBatch innovation = sample_mu_t(law, t, n, seed + 101 + static_cast<std::uint64_t>(1000 * t));
    SmoothingPoint point;
    point.t = t;
    point.w1 = wasserstein_empirical(target, innovation, 1);

    // block spread
    const int block = n / se_blocks;
    double sum = 0.0, sum2 = 0.0;
    for (int b = 0; b < se_blocks; ++b) {
      const double w = wasserstein_empirical(slice(target, b * block, block),
                                             slice(innovation, b * block, block), 1);
      sum += w;
      sum2 += w * w;
    }
    const double bm = sum / se_blocks;
    const double bvar = std::max(0.0, sum2 / se_blocks - bm * bm);
    point.se = std::sqrt(bvar / se_blocks);

    point.coupling_oracle =
        stable ? (1.0 - std::pow(1.0 - std::exp(-law.stable_alpha * t),
                                 1.0 / law.stable_alpha)) *
                     mean_norm
               : std::numeric_limits<double>::quiet_NaN();
    curve.points.push_back(point);
  }

  // least-squares slope of log W1 against t and the paper-rate envelope
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    double c_hat = 0.0;
    for (const auto& pt : curve.points) {
      if (pt.w1 > 0.0) {
        sx += pt.t;
        sy += std::log(pt.w1);
        sxx += pt.t * pt.t;
        sxy += pt.t * std::log(pt.w1);
        ++m;
        c_hat = std::max(c_hat, pt.w1 * std::exp(curve.paper_rate * pt.t));
      }
    }
    curve.fitted_slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    curve.c_hat = c_hat;
    for (auto& pt : curve.points) {
      pt.paper_envelope = c_hat * std::exp(-curve.paper_rate * pt.t);
    }
  }
  return curve;
}

void SmoothingCurve::write_csv(const std::string& path) const {
  std::ofstream csv(path);
  if (!csv) throw Error("smoothing_curve: cannot open " + path);
  csv << "t,w1,se,coupling_oracle,paper_envelope\n";
  csv.precision(12);
  for (const auto& pt : points) {
    csv << pt.t << "," << pt.w1 << "," << pt.se << "," << pt.coupling_oracle << ","
        << pt.paper_envelope << "\n";
  }
}

}  // namespace sdstein
