#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fbmjs {

/// Philox4x32-10 block function (Salmon et al., SC'11). Counter-based: the
/// output is a pure function of (counter, key), so any variate can be
/// generated independently of the others.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies the random stream of one Monte Carlo replicate.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;

  /// Standard normals number `offset`, `offset + 1`, ... of channel `channel`.
  /// A channel is usually a path component; each (seed, replicate, channel,
  /// index) maps to a fixed variate regardless of call order.
  void fill_normals(std::uint32_t channel, std::uint64_t offset,
                    std::span<double> out) const;

  double normal(std::uint32_t channel, std::uint64_t index) const;
};

}  // namespace fbmjs
