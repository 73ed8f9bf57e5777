#include "polyvar/rng.hpp"

#include <cmath>

namespace polyvar {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// Finalizer from splitmix64; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed + kGamma) ^ mix64(stream_id * 0xD1B54A32D192ED03ULL + 1))),
      counter_(0),
      cached_gaussian_(0.0),
      has_cached_gaussian_(false) {}

std::uint64_t RngStream::next_u64() {
  counter_ += kGamma;
  return mix64(key_ + counter_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_sym() {
  return 2.0 * uniform01() - 1.0;
}

double RngStream::exponential() {
  // 1 - u is in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform01());
}

double RngStream::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  for (;;) {
    const double u = uniform_sym();
    const double v = uniform_sym();
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      cached_gaussian_ = v * m;
      has_cached_gaussian_ = true;
      return u * m;
    }
  }
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  // Rejection from the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

int RngStream::sign() {
  return (next_u64() >> 63) ? 1 : -1;
}

}  // namespace polyvar
