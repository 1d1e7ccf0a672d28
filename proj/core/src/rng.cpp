#include "mchain/rng.hpp"

namespace mchain {
namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::gaussian(double mean, double std) {
  if (std == 0.0) return mean;
  return mean + std * normal();
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::size_t channel) {
  const std::uint64_t salt =
      (static_cast<std::uint64_t>(channel) + 1) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(master ^ fnv1a64(stage) ^ salt);
}

Rng stream(std::uint64_t master, std::string_view stage, std::size_t channel) {
  return Rng(derive_seed(master, stage, channel));
}

}  // namespace mchain
