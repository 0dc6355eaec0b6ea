#pragma once

#include <cstdint>
#include <random>

namespace multilift {

// Splittable stream derivation: a master seed plus a stream key is hashed
// (splitmix64) into an independent engine seed, so adding streams never
// perturbs existing ones.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                                 std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ run) ^ stream);
}

// Stream keys used by the harness.
inline constexpr std::uint64_t kStreamDisturbance = 0xD157'0000ULL;
inline constexpr std::uint64_t kStreamSensorBase = 0x5E45'0000ULL;  // + agent id

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double gaussian(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace multilift
