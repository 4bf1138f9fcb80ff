#include "fraclab/rng.hpp"

#include <cmath>
#include <numbers>

namespace fraclab {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

PhiloxCounter block(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index) {
  const PhiloxCounter counter{static_cast<std::uint32_t>(replicate),
                              static_cast<std::uint32_t>(replicate >> 32),
                              static_cast<std::uint32_t>(index),
                              static_cast<std::uint32_t>(index >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32(counter, key);
}

// 53-bit uniform on (0, 1].
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t lattice_index(StreamTag tag, std::span<const std::int64_t> k) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(tag));
  for (const std::int64_t component : k) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(component));
  }
  return h;
}

std::uint64_t lattice_index(StreamTag tag, std::int64_t k) {
  return lattice_index(tag, std::span<const std::int64_t>(&k, 1));
}

double counter_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index) {
  const PhiloxCounter out = block(seed, replicate, index);
  return to_unit(out[0], out[1]);
}

double counter_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index) {
  const PhiloxCounter out = block(seed, replicate, index);
  const double u1 = to_unit(out[0], out[1]);
  const double u2 = to_unit(out[2], out[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fraclab
