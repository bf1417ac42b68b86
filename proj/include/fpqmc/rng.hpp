#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fpqmc {

/// What a derived stream is used for. Part of the stream key so that, for
/// example, the noise and the digital shift of one cell never share draws.
enum class Purpose : std::uint64_t {
  kNoise = 1,
  kShift,
  kShuffle,
  kInitVelocity,
  kInitShift,
  kInitPosition,
  kInitPositionShift,
  kWall,
  kWallShift,
  kDemo,
};

/// splitmix64 finalizer.
constexpr std::uint64_t hash64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream id for (repetition, step, cell, purpose). Never depends on the worker.
constexpr std::uint64_t stream_id(std::uint64_t repetition, std::uint64_t step, std::uint64_t cell,
                                  Purpose purpose) {
  std::uint64_t h = hash64(static_cast<std::uint64_t>(purpose));
  h = hash64(h ^ repetition);
  h = hash64(h ^ step);
  return hash64(h ^ cell);
}

/// Seedable pseudo-random stream. Identical (seed, stream id) reproduce the
/// identical sequence.
class PseudoStream {
 public:
  using engine_type = std::mt19937_64;

  PseudoStream(std::uint64_t seed, std::uint64_t id) : engine_(hash64(hash64(seed) ^ id)) {}

  std::uint64_t next_u64() { return engine_(); }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_() >> 32); }

  /// Uniform on the open interval (0, 1) with 52-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1p-52; }

  /// Standard normal deviate by inverse transform.
  double normal();

  void normal_block(std::span<double> out);

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

/// n i.i.d. standard normal deviates.
std::vector<double> pseudo_normal_block(PseudoStream& stream, std::size_t n);

/// Uniform random permutation (Fisher-Yates).
template <class T>
void shuffle(std::span<T> items, PseudoStream& stream) {
  std::shuffle(items.begin(), items.end(), stream.engine());
}

}  // namespace fpqmc
