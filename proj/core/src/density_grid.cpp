#include <fftw3.h>

#include "sdstein/detail/fftw_lock.hpp"

#include <cmath>
#include <fstream>
#include <mutex>

#include "sdstein/charfn.hpp"
#include "sdstein/errors.hpp"

namespace sdstein {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

// Natural spatial scale of mu_t used for the Nyquist-extent check: the stable
// scaling (C (1-e^{-alpha t}))^{1/alpha} when the second moment is infinite,
// sqrt((1-e^{-2t}) m2) otherwise.
double natural_scale(const SDLawSpec& law, double t) {
  if (law.family == Family::RotInvStable || law.family == Family::SymmetricStable) {
    return std::pow(law.stable_scale * (1.0 - std::exp(-law.stable_alpha * t)),
                    1.0 / law.stable_alpha);
  }
  const double m2 = levy_moment(law, LevyMoment::M2Total);
  if (!std::isfinite(m2)) throw NonIntegrableCF("no finite scale available for this law");
  return std::sqrt((1.0 - std::exp(-2.0 * t)) * m2);
}

int default_points(int dim) {
  switch (dim) {
    case 1: return 256;
    case 2: return 128;
    default: return 32;
  }
}

}  // namespace

DensityGrid::DensityGrid(Vec origin, double dx, int points_per_axis,
                         std::vector<double> values, std::string law_id, double t)
    : origin_(std::move(origin)),
      dx_(dx),
      n_(points_per_axis),
      values_(std::move(values)),
      law_id_(std::move(law_id)),
      t_(t) {
  long long expected = 1;
  for (int a = 0; a < dim(); ++a) expected *= n_;
  if (static_cast<long long>(values_.size()) != expected) {
    throw Error("DensityGrid: value count does not match the lattice shape");
  }
  if (min_value() < -1e-8) {
    throw Error("DensityGrid: inversion ringing exceeds the negativity tolerance");
  }
  const double mass = total_mass();
  if (std::abs(mass - 1.0) > 1e-3) {
    throw Error("DensityGrid: lattice mass deviates from 1 beyond tolerance");
  }
}

double DensityGrid::cell_volume() const { return std::pow(dx_, dim()); }

double DensityGrid::value(const std::vector<int>& index) const {
  long long flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * n_ + index[a];
  return values_[static_cast<std::size_t>(flat)];
}

Vec DensityGrid::point(const std::vector<int>& index) const {
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = origin_[a] + dx_ * index[a];
  return x;
}

double DensityGrid::total_mass() const {
  double s = 0.0;
  for (const double v : values_) s += v;
  return s * cell_volume();
}

double DensityGrid::min_value() const {
  double m = kInf;
  for (const double v : values_) m = std::min(m, v);
  return m;
}

void DensityGrid::write_csv(const std::string& base_path) const {
  std::ofstream csv(base_path + ".csv");
  if (!csv) throw Error("DensityGrid: cannot open " + base_path + ".csv");
  for (int a = 0; a < dim(); ++a) csv << "x" << (a + 1) << ",";
  csv << "density\n";
  std::vector<int> idx(dim(), 0);
  for (long long flat = 0; flat < size(); ++flat) {
    long long rest = flat;
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n_);
      rest /= n_;
    }
    const Vec x = point(idx);
    csv.precision(17);
    for (int a = 0; a < dim(); ++a) csv << x[a] << ",";
    csv << values_[static_cast<std::size_t>(flat)] << "\n";
  }
  std::ofstream side(base_path + ".json");
  side << metadata().dump(2) << "\n";
}

nlohmann::json DensityGrid::metadata() const {
  nlohmann::json j;
  j["law_id"] = law_id_;
  j["t"] = t_;
  j["dimension"] = dim();
  j["points_per_axis"] = n_;
  j["dx"] = dx_;
  j["origin"] = std::vector<double>(origin_.data(), origin_.data() + origin_.size());
  j["total_mass"] = total_mass();
  j["min_value"] = min_value();
  return j;
}

namespace {

// Frequency half-width per axis: smallest Xi with |phi_t(Xi e_axis)| below the
// boundary tolerance, by doubling plus bisection on Re log phi_t.
double frequency_extent_for_axis(const SDLawSpec& law, double t, int axis, double tol) {
  const double log_tol = std::log(tol);
  auto decay = [&](double xi_val) {
    Vec xi = Vec::Zero(law.dim());
    xi[axis] = xi_val;
    return log_cf_ratio(law, xi, t).real();
  };
  double hi = 1.0;
  int doublings = 0;
  while (decay(hi) > log_tol) {
    hi *= 2.0;
    if (++doublings > 48) {
      throw NonIntegrableCF("characteristic function does not decay on the frequency box");
    }
  }
  double lo = hi / 2.0;
  if (doublings == 0) return hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (decay(mid) > log_tol ? lo : hi) = mid;
  }
  return hi;
}

std::vector<Complex> cf_lattice(const SDLawSpec& law, double t, const Vec& center,
                                double dxi, int n, int dim,
                                const std::optional<int>& gradient_axis) {
  long long size = 1;
  for (int a = 0; a < dim; ++a) size *= n;
  std::vector<Complex> values(static_cast<std::size_t>(size));
  std::vector<int> idx(dim, 0);
  Vec xi(dim);
  for (long long flat = 0; flat < size; ++flat) {
    long long rest = flat;
    int parity = 0;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
      parity += idx[a];
    }
    for (int a = 0; a < dim; ++a) xi[a] = (idx[a] - n / 2) * dxi;
    Complex value = std::exp(log_cf_ratio(law, xi, t) - kI * xi.dot(center));
    if (gradient_axis) value *= -kI * xi[*gradient_axis];
    if (parity % 2 != 0) value = -value;
    values[static_cast<std::size_t>(flat)] = value;
  }
  return values;
}

std::vector<Complex> run_fft(std::vector<Complex>& input, int n, int dim) {
  std::vector<Complex> output(input.size());
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    std::vector<int> shape(dim, n);
    fftw_plan plan = fftw_plan_dft(
        dim, shape.data(), reinterpret_cast<fftw_complex*>(input.data()),
        reinterpret_cast<fftw_complex*>(output.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return output;
}

std::vector<double> invert_lattice(const SDLawSpec& law, double t,
                                   const DensityGridParams& params, Vec& origin_out,
                                   double& dx_out, int& n_out,
                                   const std::optional<int>& gradient_axis) {
  if (law.dim() > 3) throw RouteUnavailable("density inversion supports d <= 3");
  if (!(t > 0.0)) throw Error("density_by_inversion: t must be positive");

  const int dim = law.dim();
  const int n = params.points_per_axis > 0 ? params.points_per_axis : default_points(dim);
  if ((n & (n - 1)) != 0) throw Error("density grid resolution must be a power of two");

  double xi_max = 0.0;
  if (params.frequency_extent) {
    xi_max = *params.frequency_extent;
  } else {
    for (int a = 0; a < dim; ++a) {
      xi_max = std::max(xi_max,
                        frequency_extent_for_axis(law, t, a, params.cf_boundary_tol));
    }
  }

  // A directional proxy for the mass of |phi_t| beyond the box.
  {
    Vec xi = Vec::Zero(dim);
    xi[0] = xi_max;
    const double boundary = std::exp(log_cf_ratio(law, xi, t).real());
    if (boundary * xi_max > params.tail_mass_tol) {
      throw NonIntegrableCF("frequency-box tail mass exceeds tolerance");
    }
  }

  const double dxi = 2.0 * xi_max / n;
  const double dx = 2.0 * M_PI / (n * dxi);
  const double extent = n * dx;
  const double scale = natural_scale(law, t);
  if (extent < params.min_extent_scales * scale) {
    throw GridTooCoarse("spatial extent below the required number of natural scales");
  }

  const Vec center = (1.0 - std::exp(-t)) * law.mean;
  std::vector<Complex> lattice = cf_lattice(law, t, center, dxi, n, dim, gradient_axis);
  std::vector<Complex> transformed = run_fft(lattice, n, dim);

  // phase fixups from the centred lattice indices
  const double norm = std::pow(dxi / (2.0 * M_PI), dim);
  const int half_parity = ((static_cast<long long>(n) / 2) * dim) % 2;
  std::vector<double> values(transformed.size());
  std::vector<int> idx(dim, 0);
  for (long long flat = 0; flat < static_cast<long long>(transformed.size()); ++flat) {
    long long rest = flat;
    int parity = 0;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
      parity += idx[a];
    }
    double v = transformed[static_cast<std::size_t>(flat)].real() * norm;
    if ((parity + half_parity) % 2 != 0) v = -v;
    values[static_cast<std::size_t>(flat)] = v;
  }

  origin_out = center - Vec::Constant(dim, dx * (n / 2));
  dx_out = dx;
  n_out = n;
  return values;
}

}  // namespace

DensityGrid density_by_inversion(const SDLawSpec& law, double t,
                                 const DensityGridParams& params) {
  Vec origin;
  double dx = 0.0;
  int n = 0;
  std::vector<double> values = invert_lattice(law, t, params, origin, dx, n, std::nullopt);
  return DensityGrid(origin, dx, n, std::move(values), law.id, t);
}

double density_gradient_l1(const SDLawSpec& law, double t, int axis,
                           const DensityGridParams& params) {
  Vec origin;
  double dx = 0.0;
  int n = 0;
  std::vector<double> values = invert_lattice(law, t, params, origin, dx, n, axis);
  double total = 0.0;
  for (const double v : values) total += std::abs(v);
  return total * std::pow(dx, law.dim());
}

}  // namespace sdstein
