#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fpqmc/vec3.hpp"

namespace fpqmc {

/// Largest supported bits per axis; 3 * 21 = 63 bits fit one 64-bit key.
inline constexpr unsigned kMaxMortonBits = 21;

/// Morton (Z-order) key of a quantized 3-D point. Within every 3-bit group
/// x occupies the least significant bit, then y, then z.
struct MortonKey {
  std::uint64_t value = 0;
  unsigned bits = 0;  // bits per axis
  friend bool operator==(const MortonKey&, const MortonKey&) = default;
};

/// Smallest p with 2^(3p) > n_particles (capped at kMaxMortonBits).
unsigned grid_resolution(std::size_t n_particles);

/// Maps each velocity component to [0,1] by 0.5 * (1 + (v - mean) / (3 stddev)),
/// clipped. Components with stddev <= 0 map to the grid center 0.5.
Vec3 normalize_velocity(const Vec3& v, const Vec3& mean, const Vec3& stddev);

std::uint64_t morton_interleave(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz);
std::array<std::uint32_t, 3> morton_deinterleave(std::uint64_t key);

/// Quantizes i_k = min(floor(2^p * scaled_k), 2^p - 1) and interleaves.
MortonKey morton_encode(const Vec3& scaled, unsigned p);

/// Stable LSD radix sort on 8-bit digits; returns the permutation listing
/// original indices in ascending key order. Only the low `key_bits` bits take
/// part, in ceil(key_bits / 8) counting passes. Scratch buffers are reused
/// across calls.
class RadixSorter {
 public:
  std::span<const std::uint32_t> sort(std::span<const std::uint64_t> keys, unsigned key_bits = 64);

 private:
  std::vector<std::uint64_t> keys_a_, keys_b_;
  std::vector<std::uint32_t> idx_a_, idx_b_;
};

std::vector<std::uint32_t> radix_sort_keys(std::span<const std::uint64_t> keys, unsigned key_bits = 64);
std::vector<std::uint32_t> radix_sort_keys(std::span<const MortonKey> keys);

}  // namespace fpqmc
