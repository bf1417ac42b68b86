#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "fpqmc/rng.hpp"

namespace fpqmc {

/// Sobol' direction numbers in the "d s a m_i" text format of the Joe-Kuo
/// tables. Dimension 1 (van der Corput) is implicit and never listed.
class DirectionTable {
 public:
  struct Entry {
    unsigned degree = 0;       // s
    std::uint32_t coeffs = 0;  // a
    std::vector<std::uint32_t> initial;  // m_1 .. m_s
  };

  /// Joe-Kuo direction numbers for dimensions 1-3.
  static const DirectionTable& embedded();

  /// Parses a table; the first line is a header and is skipped.
  static DirectionTable parse(std::istream& in);
  static DirectionTable load(const std::filesystem::path& path);

  std::size_t dimensions() const { return entries_.size() + 1; }

  /// 32 direction numbers v_1..v_32 of 0-based dimension `dim`, MSB aligned.
  std::array<std::uint32_t, 32> direction_numbers(std::size_t dim) const;

 private:
  std::vector<Entry> entries_;  // dimensions 2, 3, ...
};

/// Gray-code Sobol' generator with 32-bit fixed-point output and an optional
/// digital shift (bitwise XOR mask per dimension).
class SobolGenerator {
 public:
  explicit SobolGenerator(std::size_t dimensions, const DirectionTable& table = DirectionTable::embedded());

  std::size_t dimensions() const { return dims_; }

  /// Index of the next point to be emitted.
  std::uint64_t index() const { return index_; }

  /// Random access: the next emitted point will be point `index`.
  void seek(std::uint64_t index);

  void set_shift(std::span<const std::uint32_t> masks);
  std::span<const std::uint32_t> shift() const { return shift_; }

  void next_raw(std::span<std::uint32_t> point);
  void next(std::span<double> point);

  /// n consecutive points, row-major n x dimensions.
  void next_block(std::size_t n, std::span<double> out);
  std::vector<double> next_block(std::size_t n);

 private:
  void advance();

  std::size_t dims_;
  std::vector<std::array<std::uint32_t, 32>> v_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
  std::uint64_t index_ = 0;
};

/// Returns `gen` with a per-dimension shift mask drawn uniformly from `source`.
SobolGenerator apply_digital_shift(SobolGenerator gen, PseudoStream& source);

inline constexpr double kFractionScale = 0x1p-32;

/// Nested uniform scramble of the 32 binary digits of x: digit i is flipped
/// by a random bit that depends on `seed`, i and the i leading digits.
std::uint32_t owen_scramble(std::uint32_t x, std::uint64_t seed);

}  // namespace fpqmc
