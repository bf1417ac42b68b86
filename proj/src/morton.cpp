#include "fpqmc/morton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpqmc/errors.hpp"

namespace fpqmc {
namespace {

constexpr std::uint64_t spread3(std::uint64_t x) {
  x &= 0x1fffff;
  x = (x | x << 32) & 0x001f00000000ffffULL;
  x = (x | x << 16) & 0x001f0000ff0000ffULL;
  x = (x | x << 8) & 0x100f00f00f00f00fULL;
  x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
  x = (x | x << 2) & 0x1249249249249249ULL;
  return x;
}

constexpr std::uint32_t compact3(std::uint64_t x) {
  x &= 0x1249249249249249ULL;
  x = (x ^ (x >> 2)) & 0x10c30c30c30c30c3ULL;
  x = (x ^ (x >> 4)) & 0x100f00f00f00f00fULL;
  x = (x ^ (x >> 8)) & 0x001f0000ff0000ffULL;
  x = (x ^ (x >> 16)) & 0x001f00000000ffffULL;
  x = (x ^ (x >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(x);
}

}  // namespace

unsigned grid_resolution(std::size_t n_particles) {
  unsigned p = 0;
  while (p < kMaxMortonBits && (std::uint64_t{1} << (3 * p)) <= n_particles) ++p;
  return p;
}

Vec3 normalize_velocity(const Vec3& v, const Vec3& mean, const Vec3& stddev) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    if (!(stddev[k] > 0.0)) {
      out[k] = 0.5;
      continue;
    }
    out[k] = std::clamp(0.5 * (1.0 + (v[k] - mean[k]) / (3.0 * stddev[k])), 0.0, 1.0);
  }
  return out;
}

std::uint64_t morton_interleave(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) {
  return spread3(ix) | (spread3(iy) << 1) | (spread3(iz) << 2);
}

std::array<std::uint32_t, 3> morton_deinterleave(std::uint64_t key) {
  return {compact3(key), compact3(key >> 1), compact3(key >> 2)};
}

MortonKey morton_encode(const Vec3& scaled, unsigned p) {
  if (p < 1 || p > kMaxMortonBits) throw ConfigError("morton_encode: bits per axis must be in [1, 21]");
  const double cells = std::ldexp(1.0, static_cast<int>(p));
  const std::uint32_t top = (1u << p) - 1u;
  std::array<std::uint32_t, 3> idx;
  for (int k = 0; k < 3; ++k) {
    const double s = std::clamp(scaled[k], 0.0, 1.0);
    idx[k] = std::min(static_cast<std::uint32_t>(cells * s), top);
  }
  return {morton_interleave(idx[0], idx[1], idx[2]), p};
}

std::span<const std::uint32_t> RadixSorter::sort(std::span<const std::uint64_t> keys, unsigned key_bits) {
  const std::size_t n = keys.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("radix sort supports at most 2^32-1 keys");
  keys_a_.assign(keys.begin(), keys.end());
  keys_b_.resize(n);
  idx_a_.resize(n);
  idx_b_.resize(n);
  for (std::size_t i = 0; i < n; ++i) idx_a_[i] = static_cast<std::uint32_t>(i);

  const unsigned passes = (std::min(key_bits, 64u) + 7) / 8;
  std::array<std::size_t, 256> count;
  for (unsigned pass = 0; pass < passes; ++pass) {
    const unsigned shift = 8 * pass;
    count.fill(0);
    for (std::size_t i = 0; i < n; ++i) ++count[(keys_a_[i] >> shift) & 0xff];
    if (n > 0 && count[(keys_a_[0] >> shift) & 0xff] == n) continue;  // digit constant
    std::size_t sum = 0;
    for (auto& c : count) {
      const std::size_t t = c;
      c = sum;
      sum += t;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = count[(keys_a_[i] >> shift) & 0xff]++;
      keys_b_[pos] = keys_a_[i];
      idx_b_[pos] = idx_a_[i];
    }
    keys_a_.swap(keys_b_);
    idx_a_.swap(idx_b_);
  }
  return idx_a_;
}

std::vector<std::uint32_t> radix_sort_keys(std::span<const std::uint64_t> keys, unsigned key_bits) {
  RadixSorter sorter;
  auto perm = sorter.sort(keys, key_bits);
  return {perm.begin(), perm.end()};
}

std::vector<std::uint32_t> radix_sort_keys(std::span<const MortonKey> keys) {
  std::vector<std::uint64_t> raw(keys.size());
  unsigned bits = 1;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    raw[i] = keys[i].value;
    bits = std::max(bits, keys[i].bits);
  }
  return radix_sort_keys(raw, 3 * bits);
}

}  // namespace fpqmc
