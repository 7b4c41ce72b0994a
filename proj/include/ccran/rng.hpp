#pragma once

#include <cstdint>
#include <random>

namespace ccran {

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

/// Purpose tags for independent streams derived from one seed.
///
/// A stream is identified by (seed, tag). Per-interval seeds are
/// `base_seed ^ interval`, so any interval can be regenerated on its own
/// without replaying earlier ones.
enum class Stream : std::uint64_t {
  kUsers = 1,
  kCache = 2,
  kShadowing = 3,
  kFading = 4,
  kRequests = 5,
  kRandomization = 6,
  kInstance = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t interval_seed(std::uint64_t base_seed,
                                      std::uint64_t interval) {
  return base_seed ^ interval;
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

/// Seed for the i-th member of a family of test or sample instances.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x100));
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(stream_seed(seed, stream));
}

}  // namespace ccran
