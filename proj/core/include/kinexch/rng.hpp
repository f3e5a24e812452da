#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kinexch {

__extension__ using uint128 = unsigned __int128;

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of replica `stream` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Random stream with platform-independent variate generation.
///
/// The standard distributions are implementation-defined, so replay across
/// standard libraries would not be byte-identical. Everything here is
/// derived from the raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (rate > 0).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t index(std::uint64_t n) {
    uint128 m = static_cast<uint128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kinexch
