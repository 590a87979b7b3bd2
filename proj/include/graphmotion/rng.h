#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace gm {

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic normal stream: Box-Muller over mt19937_64, exactly two
// uniform draws per sample. std::normal_distribution keeps a hidden spare
// value and its bits are implementation-defined; this is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // (0,1]; never 0 so log() below is finite
  double uniform01() { return (double((eng_() >> 11)) + 1.0) * 0x1.0p-53; }

  double gaussian() {
    const double two_pi = 6.283185307179586;
    double u = uniform01(), v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(two_pi * v);
  }

 private:
  std::mt19937_64 eng_;
};

// Per-character stream: relabeling characters permutes streams with them,
// and guidance draws nothing, so paired-seed A/B runs see identical noise.
inline Rng character_stream(std::uint64_t master_seed, std::string_view character_id) {
  return Rng(splitmix64(master_seed ^ fnv1a64(character_id)));
}

}  // namespace gm
