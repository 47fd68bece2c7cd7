#pragma once

#include <cstdint>
#include <random>

namespace ponwm {

// splitmix64 finalizer over (seed, stream); used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Maps 64 random bits onto [0, 1).
double unit_interval(std::uint64_t bits);

// Seeded generator with a platform-independent draw sequence. Only raw
// mt19937_64 output is consumed; distributions are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Open interval (0, 1).
  double uniform();
  double normal(double mean, double stddev);
  // Inverse-CDF sampling of N(mean, stddev) restricted to [lo, hi].
  double truncated_normal(double mean, double stddev, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

// Mean of N(mean, stddev) truncated to [lo, hi].
double truncated_normal_mean(double mean, double stddev, double lo, double hi);

}  // namespace ponwm
