#include "fbmjs/random.hpp"

#include <cmath>
#include <numbers>

namespace fbmjs {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Two normals from one Philox block via Box-Muller.
inline void normal_pair(const RngStream& s, std::uint32_t channel,
                        std::uint64_t block, double& z0, double& z1) {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block), channel,
      static_cast<std::uint32_t>(s.replicate_index),
      static_cast<std::uint32_t>(s.replicate_index >> 32) ^
          static_cast<std::uint32_t>(block >> 32)};
  const std::array<std::uint32_t, 2> key{
      static_cast<std::uint32_t>(s.master_seed),
      static_cast<std::uint32_t>(s.master_seed >> 32)};
  const auto r = philox4x32(ctr, key);
  const double u1 = to_open_unit(r[0], r[1]);
  const double u2 = to_open_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void RngStream::fill_normals(std::uint32_t channel, std::uint64_t offset,
                             std::span<double> out) const {
  std::size_t i = 0;
  double z0 = 0.0;
  double z1 = 0.0;
  if (offset % 2 == 1 && !out.empty()) {
    normal_pair(*this, channel, offset / 2, z0, z1);
    out[i++] = z1;
  }
  std::uint64_t block = (offset + i) / 2;
  for (; i + 1 < out.size(); i += 2, ++block) {
    normal_pair(*this, channel, block, z0, z1);
    out[i] = z0;
    out[i + 1] = z1;
  }
  if (i < out.size()) {
    normal_pair(*this, channel, block, z0, z1);
    out[i] = z0;
  }
}

double RngStream::normal(std::uint32_t channel, std::uint64_t index) const {
  double z0 = 0.0;
  double z1 = 0.0;
  normal_pair(*this, channel, index / 2, z0, z1);
  return index % 2 == 0 ? z0 : z1;
}

}  // namespace fbmjs
