#ifndef POLYVAR_RNG_HPP
#define POLYVAR_RNG_HPP

#include <cstdint>

namespace polyvar {

// Counter-based pseudo-random stream.  A stream is fully determined by
// (seed, stream_id), so parallel workers that each own a distinct
// stream_id reproduce the same draws regardless of scheduling.  Output
// i of a stream is mix(key + i*gamma), which makes the generator
// splittable and trivially restartable.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53 random mantissa bits.
  double uniform01();

  // Uniform on [-1, 1).
  double uniform_sym();

  // Standard exponential via inverse CDF.
  double exponential();

  // Standard normal via the Marsaglia polar method; draws are cached in
  // pairs so consecutive calls stay deterministic.
  double gaussian();

  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Fair coin as +1 / -1.
  int sign();

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  double cached_gaussian_;
  bool has_cached_gaussian_;
};

}  // namespace polyvar

#endif
