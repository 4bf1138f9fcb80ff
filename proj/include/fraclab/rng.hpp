#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fraclab {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A block is a pure function of (counter, key): no state is carried between
/// draws, so any element of a random family can be produced independently.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Stream tags separating the random families used by the library.
enum class StreamTag : std::uint64_t {
  cell_multiplier = 0x6b616e746f726f76ULL,
  white_noise = 0x77686974656e6f69ULL,
  spectrum = 0x737065637472756dULL,
  forcing = 0x666f7263696e6721ULL,
  generic = 0x67656e6572696321ULL,
};

/// 64-bit index for a lattice point (or any small integer tuple) within a tag.
std::uint64_t lattice_index(StreamTag tag, std::span<const std::int64_t> k);
std::uint64_t lattice_index(StreamTag tag, std::int64_t k);

/// Standard Gaussian keyed by (seed, replicate, index). Pure and reentrant.
double counter_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index);

/// Uniform on (0, 1] keyed by (seed, replicate, index).
double counter_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index);

}  // namespace fraclab
