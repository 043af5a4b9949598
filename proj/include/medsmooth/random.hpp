#pragma once

#include <cstdint>
#include <random>

namespace medsmooth {

/// Independent generator for one (seed, stream, index) key. Each noise sample
/// owns its own stream, so samples can be drawn in any order or in parallel.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace medsmooth
