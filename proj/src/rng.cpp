#include "hyperorient/rng.hpp"

#include <stdexcept>

namespace hyperorient {

namespace {

std::mt19937_64 seeded_engine(RngSeed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(seed.stream),
                    static_cast<std::uint32_t>(seed.stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(RngSeed seed) : engine_(seeded_engine(seed)) {}

// Lemire's nearly-divisionless bounded draw.
std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below(0)");
  unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace hyperorient
