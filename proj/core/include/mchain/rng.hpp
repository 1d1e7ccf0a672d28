#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace mchain {

/// Explicit random state threaded through every sampler. Two Rng objects
/// constructed from the same seed produce identical streams.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Engine& engine() noexcept { return engine_; }

  /// Uniform draw on [0, 1).
  double uniform();
  /// Uniform draw on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal draw.
  double normal();
  /// mean + std * N(0,1); returns mean exactly when std == 0.
  double gaussian(double mean, double std);

 private:
  Engine engine_;
};

/// Seed for an independent stream keyed by (stage, channel).
///
/// key = splitmix64(master ^ fnv1a64(stage) ^ (channel + 1) * 0x9e3779b97f4a7c15)
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::size_t channel = 0);

/// Rng seeded with derive_seed(master, stage, channel).
Rng stream(std::uint64_t master, std::string_view stage,
           std::size_t channel = 0);

}  // namespace mchain
