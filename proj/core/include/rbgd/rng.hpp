#pragma once

#include <cstdint>
#include <limits>

#include "rbgd/numerics.hpp"

namespace rbgd {

/** xoshiro256** generator seeded through splitmix64.
 *
 * Satisfies UniformRandomBitGenerator. One owner per stream: a run that
 * needs independent streams derives them with fork(). */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal draw (polar Box-Muller, cached pair).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Independent generator for a named sub-stream of this seed.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// rows x cols matrix of i.i.d. standard normals, filled column by column.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

}  // namespace rbgd
