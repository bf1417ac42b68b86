#include "fpqmc/sobol.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <string>

#include "fpqmc/errors.hpp"

namespace fpqmc {

const DirectionTable& DirectionTable::embedded() {
  static const DirectionTable table = [] {
    std::istringstream in(
        "d       s       a       m_i\n"
        "2       1       0       1\n"
        "3       2       1       1 3\n");
    return parse(in);
  }();
  return table;
}

DirectionTable DirectionTable::parse(std::istream& in) {
  DirectionTable table;
  std::string line;
  std::getline(in, line);  // header
  std::size_t expected = 2;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::size_t d = 0;
    Entry e;
    if (!(row >> d)) continue;  // blank line
    if (!(row >> e.degree >> e.coeffs) || e.degree == 0 || e.degree > 31)
      throw ConfigError("direction table: malformed row for dimension " + std::to_string(d));
    if (d != expected) throw ConfigError("direction table: dimensions must be consecutive from 2");
    e.initial.resize(e.degree);
    for (unsigned i = 0; i < e.degree; ++i) {
      if (!(row >> e.initial[i])) throw ConfigError("direction table: missing m_i in dimension " + std::to_string(d));
      if (e.initial[i] % 2 == 0 || e.initial[i] >= (2u << i))
        throw ConfigError("direction table: m_i must be odd and below 2^i");
    }
    table.entries_.push_back(std::move(e));
    ++expected;
  }
  return table;
}

DirectionTable DirectionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open direction table " + path.string());
  return parse(in);
}

std::array<std::uint32_t, 32> DirectionTable::direction_numbers(std::size_t dim) const {
  if (dim >= dimensions())
    throw ConfigError("Sobol' dimension " + std::to_string(dim + 1) + " not available in direction table");
  std::array<std::uint32_t, 32> v{};
  if (dim == 0) {
    for (unsigned i = 0; i < 32; ++i) v[i] = 1u << (31 - i);
    return v;
  }
  const Entry& e = entries_[dim - 1];
  const unsigned s = e.degree;
  for (unsigned i = 0; i < s && i < 32; ++i) v[i] = e.initial[i] << (31 - i);
  for (unsigned i = s; i < 32; ++i) {
    std::uint32_t x = v[i - s] ^ (v[i - s] >> s);
    for (unsigned k = 1; k < s; ++k)
      if ((e.coeffs >> (s - 1 - k)) & 1u) x ^= v[i - k];
    v[i] = x;
  }
  return v;
}

SobolGenerator::SobolGenerator(std::size_t dimensions, const DirectionTable& table)
    : dims_(dimensions), state_(dimensions, 0), shift_(dimensions, 0) {
  if (dimensions == 0) throw ConfigError("Sobol' generator needs at least one dimension");
  v_.reserve(dimensions);
  for (std::size_t d = 0; d < dimensions; ++d) v_.push_back(table.direction_numbers(d));
}

void SobolGenerator::seek(std::uint64_t index) {
  if (index >= (std::uint64_t{1} << 32)) throw ConfigError("Sobol' index exceeds 32-bit resolution");
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t d = 0; d < dims_; ++d) {
    std::uint32_t x = 0;
    for (unsigned bit = 0; bit < 32; ++bit)
      if ((gray >> bit) & 1u) x ^= v_[d][bit];
    state_[d] = x;
  }
  index_ = index;
}

void SobolGenerator::set_shift(std::span<const std::uint32_t> masks) {
  if (masks.size() != dims_) throw ConfigError("digital shift needs one mask per dimension");
  shift_.assign(masks.begin(), masks.end());
}

void SobolGenerator::advance() {
  const std::uint64_t next = index_ + 1;
  if (next >= (std::uint64_t{1} << 32)) throw ConfigError("Sobol' index exceeds 32-bit resolution");
  const unsigned c = static_cast<unsigned>(std::countr_zero(next));
  for (std::size_t d = 0; d < dims_; ++d) state_[d] ^= v_[d][c];
  index_ = next;
}

void SobolGenerator::next_raw(std::span<std::uint32_t> point) {
  for (std::size_t d = 0; d < dims_; ++d) point[d] = state_[d] ^ shift_[d];
  advance();
}

void SobolGenerator::next(std::span<double> point) {
  for (std::size_t d = 0; d < dims_; ++d) point[d] = static_cast<double>(state_[d] ^ shift_[d]) * kFractionScale;
  advance();
}

void SobolGenerator::next_block(std::size_t n, std::span<double> out) {
  if (out.size() < n * dims_) throw ConfigError("Sobol' block output too small");
  if (n > 0 && index_ + n > (std::uint64_t{1} << 32)) throw ConfigError("Sobol' index exceeds 32-bit resolution");
  for (std::size_t i = 0; i < n; ++i) next(out.subspan(i * dims_, dims_));
}

std::vector<double> SobolGenerator::next_block(std::size_t n) {
  std::vector<double> out(n * dims_);
  next_block(n, out);
  return out;
}

SobolGenerator apply_digital_shift(SobolGenerator gen, PseudoStream& source) {
  std::vector<std::uint32_t> masks(gen.dimensions());
  for (auto& m : masks) m = source.next_u32();
  gen.set_shift(masks);
  return gen;
}

std::uint32_t owen_scramble(std::uint32_t x, std::uint64_t seed) {
  std::uint32_t out = 0;
  for (unsigned i = 0; i < 32; ++i) {
    const unsigned b = 31 - i;
    const std::uint64_t prefix = i == 0 ? 0 : x >> (b + 1);
    const std::uint64_t flip = hash64(seed ^ hash64((std::uint64_t{i} << 32) | prefix)) & 1u;
    out |= static_cast<std::uint32_t>(((x >> b) ^ flip) & 1u) << b;
  }
  return out;
}

}  // namespace fpqmc
