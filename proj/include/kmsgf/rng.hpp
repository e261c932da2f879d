#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace kmsgf {

/** Philox4x32 block cipher, 10 rounds: maps a 128-bit counter and 64-bit key
 *  to four statistically independent 32-bit words. */
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stream tags keeping logically distinct random uses on disjoint counters.
inline constexpr std::uint32_t stream_normals = 0;
inline constexpr std::uint32_t stream_atoms = 1;

/** Counter-based randomness keyed by a seed.  Each (draw, block, stream)
 *  triple addresses one independent 128-bit block, so values depend only on
 *  their address: chunked, reordered, or parallel generation reproduces the
 *  identical stream. */
struct CounterRng {
  std::uint64_t seed = 0;

  std::array<std::uint32_t, 4> raw(std::uint64_t draw, std::uint32_t block,
                                   std::uint32_t stream) const;

  /** One uniform in (0, 1] from the block's first 64 bits. */
  double uniform(std::uint64_t draw, std::uint32_t block, std::uint32_t stream) const;

  /** Two standard normals per block via Box-Muller. */
  std::pair<double, double> normal_pair(std::uint64_t draw, std::uint32_t block) const;
};

} // namespace kmsgf
