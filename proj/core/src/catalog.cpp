#include "sdstein/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sdstein/errors.hpp"

namespace sdstein::catalog {

namespace {

using nlohmann::json;

void require_fields(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigInvalid(where + ": unknown field '" + key + "'");
  }
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

std::vector<SphericalAtom> atoms_from_json(const json& j, int dim) {
  std::vector<SphericalAtom> atoms;
  for (const auto& a : j) {
    require_fields(a, {"direction", "weight"}, "atom");
    Vec dir = vec_from_json(a.at("direction"));
    if (dir.size() != dim) throw ConfigInvalid("atom direction has wrong dimension");
    atoms.push_back({dir, a.at("weight").get<double>()});
  }
  return atoms;
}

}  // namespace

double stable_sigma(double alpha) {
  return -std::tgamma(-alpha) * std::cos(M_PI * alpha / 2.0);
}

double sphere_abs_moment(int dim, double alpha) {
  return std::exp(std::lgamma((alpha + 1.0) / 2.0) + std::lgamma(dim / 2.0) -
                  std::lgamma((alpha + dim) / 2.0) - std::lgamma(0.5));
}

SDLawSpec rot_inv_stable(int dim, double alpha, std::optional<double> scale_C) {
  const double natural_C = stable_sigma(alpha) * sphere_abs_moment(dim, alpha);
  const double coeff = scale_C ? *scale_C / natural_C : 1.0;
  SDLawSpec law;
  law.id = "rot_inv_stable_d" + std::to_string(dim);
  law.mean = Vec::Zero(dim);
  law.levy = PolarLevyMeasure::rotationally_invariant(
      dim, RadialProfile::power(coeff, alpha));
  law.family = Family::RotInvStable;
  law.stable_alpha = alpha;
  law.stable_scale = scale_C ? *scale_C : natural_C;
  return law;
}

SDLawSpec symmetric_stable(double alpha, std::vector<SphericalAtom> atoms, double coeff) {
  if (atoms.empty()) throw Error("symmetric_stable: need at least one atom pair");
  const int dim = static_cast<int>(atoms.front().direction.size());
  // every atom needs an antipodal partner of equal weight
  for (const auto& a : atoms) {
    bool paired = false;
    for (const auto& b : atoms) {
      if ((a.direction + b.direction).norm() < 1e-9 &&
          std::abs(a.weight - b.weight) < 1e-12) {
        paired = true;
        break;
      }
    }
    if (!paired) throw Error("symmetric_stable: atoms must form antipodal pairs of equal weight");
  }
  std::vector<RadialProfile> profiles(atoms.size(), RadialProfile::power(coeff, alpha));
  SDLawSpec law;
  law.id = "symmetric_stable_d" + std::to_string(dim);
  law.mean = Vec::Zero(dim);
  law.levy = PolarLevyMeasure(dim, std::move(atoms), std::move(profiles));
  law.family = Family::SymmetricStable;
  law.stable_alpha = alpha;
  law.stable_scale = coeff * stable_sigma(alpha);
  return law;
}

SDLawSpec multi_gamma(const Vec& shape, const Vec& rate) {
  const int dim = static_cast<int>(shape.size());
  if (rate.size() != dim) throw Error("multi_gamma: shape/rate size mismatch");
  double total_shape = 0.0;
  for (int j = 0; j < dim; ++j) {
    if (shape[j] <= 0.0 || rate[j] <= 0.0) throw Error("multi_gamma: parameters must be positive");
    total_shape += shape[j];
  }
  std::vector<SphericalAtom> atoms;
  std::vector<RadialProfile> profiles;
  Vec mean(dim);
  for (int j = 0; j < dim; ++j) {
    Vec dir = Vec::Zero(dim);
    dir[j] = 1.0;
    // weight_j * coeff_j = shape_j with the sphere normalised to mass 1
    atoms.push_back({dir, shape[j] / total_shape});
    profiles.push_back(RadialProfile::exponential(total_shape, rate[j]));
    mean[j] = shape[j] / rate[j];
  }
  SDLawSpec law;
  law.id = "multi_gamma_d" + std::to_string(dim);
  law.mean = mean;
  law.levy = PolarLevyMeasure(dim, std::move(atoms), std::move(profiles));
  law.family = Family::MultiGamma;
  law.gamma_shape = shape;
  law.gamma_rate = rate;
  return law;
}

SDLawSpec gamma1d(double shape, double rate) {
  Vec s(1), r(1);
  s << shape;
  r << rate;
  SDLawSpec law = multi_gamma(s, r);
  law.id = "gamma1d";
  return law;
}

SDLawSpec exp_profile(std::vector<SphericalAtom> atoms, double alpha, double beta,
                      std::optional<Vec> mean) {
  if (atoms.empty()) throw Error("exp_profile: need at least one atom");
  const int dim = static_cast<int>(atoms.front().direction.size());
  const std::size_t n = atoms.size();
  std::vector<RadialProfile> profiles(n, RadialProfile::exponential(alpha, beta));
  Vec natural_mean = Vec::Zero(dim);
  Vec theta(n), rates(n);
  for (std::size_t i = 0; i < n; ++i) {
    natural_mean += atoms[i].weight * (alpha / beta) * atoms[i].direction;
    theta[static_cast<int>(i)] = atoms[i].weight * alpha;
    rates[static_cast<int>(i)] = beta;
  }
  SDLawSpec law;
  law.id = "exp_profile_d" + std::to_string(dim);
  law.mean = mean ? *mean : natural_mean;
  law.levy = PolarLevyMeasure(dim, std::move(atoms), std::move(profiles));
  law.family = Family::ExpProfile;
  law.gamma_shape = theta;
  law.gamma_rate = rates;
  return law;
}

SDLawSpec custom(int dim, std::vector<SphericalAtom> atoms,
                 std::vector<RadialProfile> profiles, Vec mean, const std::string& id) {
  SDLawSpec law;
  law.id = id;
  law.mean = std::move(mean);
  law.levy = PolarLevyMeasure(dim, std::move(atoms), std::move(profiles));
  law.family = Family::Custom;
  return law;
}

SDLawSpec from_json(const json& j) {
  require_fields(j, {"family", "dimension", "params", "mean", "id"}, "law");
  const std::string family = j.at("family").get<std::string>();
  const int dim = j.at("dimension").get<int>();
  const json params = j.value("params", json::object());
  std::optional<Vec> mean;
  if (j.contains("mean")) mean = vec_from_json(j.at("mean"));

  SDLawSpec law;
  if (family == "rot_inv_stable") {
    require_fields(params, {"alpha", "C"}, "rot_inv_stable params");
    std::optional<double> C;
    if (params.contains("C")) C = params.at("C").get<double>();
    law = rot_inv_stable(dim, params.at("alpha").get<double>(), C);
    if (mean) law.mean = *mean;
  } else if (family == "symmetric_stable") {
    require_fields(params, {"alpha", "atoms", "coeff"}, "symmetric_stable params");
    law = symmetric_stable(params.at("alpha").get<double>(),
                           atoms_from_json(params.at("atoms"), dim),
                           params.value("coeff", 1.0));
    if (mean) law.mean = *mean;
  } else if (family == "multi_gamma") {
    require_fields(params, {"shape", "rate"}, "multi_gamma params");
    Vec shape = vec_from_json(params.at("shape"));
    Vec rate = params.contains("rate") ? vec_from_json(params.at("rate"))
                                       : Vec::Ones(shape.size());
    law = multi_gamma(shape, rate);
    if (mean) law.mean = *mean;
  } else if (family == "exp_profile") {
    require_fields(params, {"alpha", "beta", "atoms"}, "exp_profile params");
    law = exp_profile(atoms_from_json(params.at("atoms"), dim),
                      params.at("alpha").get<double>(), params.at("beta").get<double>(),
                      mean);
  } else if (family == "custom") {
    require_fields(params, {"atoms", "profiles"}, "custom params");
    std::vector<SphericalAtom> atoms = atoms_from_json(params.at("atoms"), dim);
    std::vector<RadialProfile> profiles;
    for (const auto& p : params.at("profiles")) {
      require_fields(p, {"kind", "coeff", "alpha", "beta", "csv", "r", "k"}, "profile");
      const std::string kind = p.at("kind").get<std::string>();
      if (kind == "power") {
        profiles.push_back(
            RadialProfile::power(p.value("coeff", 1.0), p.at("alpha").get<double>()));
      } else if (kind == "exponential") {
        profiles.push_back(RadialProfile::exponential(p.value("coeff", 1.0),
                                                      p.at("beta").get<double>()));
      } else if (kind == "tabulated") {
        if (p.contains("csv")) {
          profiles.push_back(tabulated_profile_from_csv(p.at("csv").get<std::string>()));
        } else {
          profiles.push_back(RadialProfile::tabulated(
              p.at("r").get<std::vector<double>>(), p.at("k").get<std::vector<double>>()));
        }
      } else {
        throw ConfigInvalid("unknown profile kind '" + kind + "'");
      }
    }
    if (!mean) throw ConfigInvalid("custom law requires an explicit mean");
    law = custom(dim, std::move(atoms), std::move(profiles), *mean);
  } else {
    throw ConfigInvalid("unknown family '" + family + "'");
  }
  if (j.contains("id")) law.id = j.at("id").get<std::string>();
  return law;
}

SDLawSpec load_law_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open law file: " + path);
  json j;
  in >> j;
  return from_json(j);
}

RadialProfile tabulated_profile_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open profile CSV: " + path);
  std::vector<double> r, k;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw ConfigInvalid("profile CSV: expected two comma-separated columns");
    }
    try {
      r.push_back(std::stod(a));
      k.push_back(std::stod(b));
    } catch (const std::exception&) {
      // header row
      if (!r.empty()) throw ConfigInvalid("profile CSV: non-numeric row");
    }
  }
  return RadialProfile::tabulated(std::move(r), std::move(k));
}

std::vector<SDLawSpec> standard_catalog() {
  std::vector<SDLawSpec> laws;
  laws.push_back(gamma1d(2.0, 1.0));
  {
    Vec shape(2), rate(2);
    shape << 1.0, 2.0;
    rate << 1.0, 1.0;
    laws.push_back(multi_gamma(shape, rate));
  }
  laws.push_back(rot_inv_stable(1, 1.5));
  laws.push_back(rot_inv_stable(2, 1.5));
  {
    std::vector<SphericalAtom> atoms;
    for (const double s : {1.0, -1.0}) {
      for (int j = 0; j < 2; ++j) {
        Vec dir = Vec::Zero(2);
        dir[j] = s;
        atoms.push_back({dir, 0.25});
      }
    }
    laws.push_back(symmetric_stable(1.5, std::move(atoms)));
  }
  {
    std::vector<SphericalAtom> atoms;
    atoms.push_back({Vec::Constant(1, 1.0), 0.5});
    atoms.push_back({Vec::Constant(1, -1.0), 0.5});
    SDLawSpec law = exp_profile(std::move(atoms), 1.0, 1.0);
    law.id = "exp_profile_sym_d1";
    laws.push_back(law);
  }
  {
    std::vector<SphericalAtom> atoms;
    for (const double sx : {1.0, -1.0}) {
      for (const double sy : {1.0, -1.0}) {
        Vec dir(2);
        dir << sx / std::sqrt(2.0), sy / std::sqrt(2.0);
        atoms.push_back({dir, 0.25});
      }
    }
    SDLawSpec law = exp_profile(std::move(atoms), 1.0, 1.0);
    law.id = "exp_profile_diag_d2";
    laws.push_back(law);
  }
  return laws;
}

}  // namespace sdstein::catalog
