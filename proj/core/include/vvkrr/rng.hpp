#pragma once

#include <cstdint>
#include <random>

namespace vvkrr {

// Independent stream for (seed, stream). Used to give every experiment cell
// its own generator so results do not depend on scheduling.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  return rng();
}

}  // namespace vvkrr
