#include "kmsgf/rng.hpp"

#include <cmath>

namespace kmsgf {

namespace {

constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;  // golden ratio fraction
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;  // sqrt(3) - 1 fraction

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(philox_m0, c[0], hi0, lo0);
    mulhilo(philox_m1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += philox_w0;
    k[1] += philox_w1;
  }
  return c;
}

std::array<std::uint32_t, 4> CounterRng::raw(std::uint64_t draw, std::uint32_t block,
                                             std::uint32_t stream) const {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
      block, stream};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32(counter, key);
}

namespace {

// 53-bit mantissa from two words; +1 shifts [0,1) to (0,1] so log() is safe.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
  return double((u >> 11) + 1) * 0x1.0p-53;
}

inline double to_unit_halfopen(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
  return double(u >> 11) * 0x1.0p-53;
}

} // namespace

double CounterRng::uniform(std::uint64_t draw, std::uint32_t block,
                           std::uint32_t stream) const {
  const auto x = raw(draw, block, stream);
  return to_unit_open(x[0], x[1]);
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t draw,
                                                  std::uint32_t block) const {
  const auto x = raw(draw, block, stream_normals);
  const double u1 = to_unit_open(x[0], x[1]);
  const double u2 = to_unit_halfopen(x[2], x[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::acos(-1.0) * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

} // namespace kmsgf
