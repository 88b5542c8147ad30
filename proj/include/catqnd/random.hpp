#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace catqnd {

/// Seeded stream of random draws. Move-only: one source per sampling thread.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  RandomSource(RandomSource&&) = default;
  RandomSource& operator=(RandomSource&&) = default;

  /// Independent stream for item `index` of a run seeded with `seed`.
  static RandomSource derived(std::uint64_t seed, std::uint64_t index) {
    return RandomSource(splitmix64(splitmix64(seed) ^ (index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const noexcept { return seed_; }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  /// Index drawn with probability proportional to weights[i].
  std::size_t discrete(std::span<const double> weights) {
    return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(engine_);
  }

private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace catqnd
