#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hyperorient {

// Master seed plus stream index. Trial t of an experiment draws from
// RngSeed{master, t}, so results do not depend on scheduling.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// mt19937_64 keyed by seed_seq over (seed, stream). Both the engine and
// seed_seq are fully specified by the standard; the bounded draws below
// are written out so the whole sequence is reproducible across platforms.
class Rng {
 public:
  explicit Rng(RngSeed seed);
  explicit Rng(std::uint64_t seed) : Rng(RngSeed{seed, 0}) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hyperorient
