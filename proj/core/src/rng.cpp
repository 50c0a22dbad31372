#include "sdstein/rng.hpp"

#include <cmath>

namespace sdstein {

namespace philox {
namespace {

constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;

}  // namespace

Block generate(const Block& counter, const Key& key) {
  Block c = counter;
  Key k = key;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

}  // namespace philox

namespace {

// FNV-1a, used to fold the purpose tag into the key material.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ull) {
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view purpose, std::uint64_t stream) {
  const std::uint64_t tag = fnv1a(purpose);
  const std::uint64_t key_material = mix64(seed ^ mix64(tag));
  key_ = {static_cast<std::uint32_t>(key_material),
          static_cast<std::uint32_t>(key_material >> 32)};
  const std::uint64_t stream_material = mix64(stream ^ mix64(tag + 0x632BE59BD9B4E019ull));
  stream_words_ = {static_cast<std::uint32_t>(stream_material),
                   static_cast<std::uint32_t>(stream_material >> 32)};
}

void RngStream::refill() {
  const philox::Block ctr = {static_cast<std::uint32_t>(counter_),
                             static_cast<std::uint32_t>(counter_ >> 32),
                             stream_words_[0], stream_words_[1]};
  buffer_ = philox::generate(ctr, key_);
  ++counter_;
  buffer_pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (buffer_pos_ >= 4) refill();
  return buffer_[buffer_pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double RngStream::uniform() {
  // (x + 0.5) / 2^53 lies strictly inside (0,1).
  const std::uint64_t x = next_u64() >> 11;
  return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    // Boost from shape+1; the extra uniform keeps the density exact.
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

long long RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Split large means into chunks; the multiplication method stays exact and
  // the uniform count per chunk is O(chunk mean).
  long long total = 0;
  while (mean > 12.0) {
    total += poisson(12.0);
    mean -= 12.0;
  }
  const double threshold = std::exp(-mean);
  long long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > threshold);
  return total + (k - 1);
}

double RngStream::positive_stable(double rho) {
  // Kanter: S = (A(theta)/W)^((1-rho)/rho), theta ~ U(0,pi), W ~ Exp(1),
  // A(theta) = [sin(rho t)^rho sin((1-rho)t)^(1-rho) / sin t]^(1/(1-rho)).
  const double theta = uniform() * M_PI;
  const double w = exponential();
  const double a = std::pow(std::pow(std::sin(rho * theta), rho) *
                                std::pow(std::sin((1.0 - rho) * theta), 1.0 - rho) /
                                std::sin(theta),
                            1.0 / (1.0 - rho));
  return std::pow(a / w, (1.0 - rho) / rho);
}

double RngStream::symmetric_stable(double alpha) {
  // Chambers-Mallows-Stuck for the symmetric case.
  const double v = M_PI * (uniform() - 0.5);
  const double w = exponential();
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((alpha - 1.0) * v) / w, (1.0 - alpha) / alpha);
}

Vec RngStream::normal_vec(int d) {
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = normal();
  return out;
}

Vec RngStream::uniform_direction(int d) {
  if (d == 1) return Vec::Constant(1, uniform() < 0.5 ? -1.0 : 1.0);
  for (;;) {
    Vec g = normal_vec(d);
    const double norm = g.norm();
    if (norm > 1e-12) return g / norm;
  }
}

}  // namespace sdstein
