#pragma once

#include <cstdint>
#include <random>

namespace blackout {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `master_seed`. Sample i of a set always
/// draws from substream i, whatever the worker count or schedule.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Per-sample random stream. mt19937_64's output sequence is fixed by the
/// standard and the uniform conversion below is explicit, so draws are
/// bit-identical across standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t index)
      : engine_(derive_seed(master_seed, index)), index_(index) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t index() const { return index_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t index_;
};

}  // namespace blackout
