#pragma once

// Counter-based random number generation (Philox4x32-10, Salmon et al. 2011).
//
// Every consumer owns an RngStream keyed by (seed, purpose tag, stream index).
// Streams with distinct keys are statistically independent, and a stream's
// output depends only on its key and draw counter, never on evaluation order.
// This is what makes parallel Monte Carlo deterministic: workers may consume
// per-sample streams in any order and still reproduce the serial result.

#include <array>
#include <cstdint>
#include <string_view>

#include "sdstein/types.hpp"

namespace sdstein {

namespace philox {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// One 10-round Philox4x32 block: 128-bit counter + 64-bit key -> 128 bits.
Block generate(const Block& counter, const Key& key);

}  // namespace philox

/// An independent random stream addressed by (seed, purpose, stream index).
///
/// The purpose tag separates uses ("target", "mu_t", ...); the stream index
/// separates parallel units (sample index, atom index). Draws are buffered
/// four 32-bit words at a time.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view purpose, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal (Box-Muller; the spare deviate is cached).
  double normal();
  /// Exponential with unit rate.
  double exponential();
  /// Gamma with given shape, unit rate (Marsaglia-Tsang).
  double gamma(double shape);
  /// Poisson count with the given mean.
  long long poisson(double mean);

  /// Positive stable S with Laplace transform E exp(-u S) = exp(-u^rho),
  /// rho in (0,1) (Kanter's representation).
  double positive_stable(double rho);
  /// Standard symmetric alpha-stable, CF exp(-|xi|^alpha), alpha in (0,2).
  double symmetric_stable(double alpha);

  /// d independent standard normals.
  Vec normal_vec(int d);
  /// Uniform direction on the unit sphere S^{d-1}.
  Vec uniform_direction(int d);

 private:
  void refill();

  philox::Key key_;
  std::array<std::uint32_t, 2> stream_words_;
  std::uint64_t counter_ = 0;
  philox::Block buffer_{};
  int buffer_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace sdstein
