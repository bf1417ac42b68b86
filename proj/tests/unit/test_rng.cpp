#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fpqmc/errors.hpp"
#include "fpqmc/normal.hpp"
#include "fpqmc/rng.hpp"
#include "fpqmc/sobol.hpp"

using namespace fpqmc;

namespace {

// Unscrambled 3-D Sobol' points 0..15 (Joe-Kuo directions), from scipy.stats.qmc.Sobol.
constexpr double kSobol16[16][3] = {
    {0.0, 0.0, 0.0},          {0.5, 0.5, 0.5},          {0.75, 0.25, 0.25},       {0.25, 0.75, 0.75},
    {0.375, 0.375, 0.625},    {0.875, 0.875, 0.125},    {0.625, 0.125, 0.875},    {0.125, 0.625, 0.375},
    {0.1875, 0.3125, 0.9375}, {0.6875, 0.8125, 0.4375}, {0.9375, 0.0625, 0.6875}, {0.4375, 0.5625, 0.1875},
    {0.3125, 0.1875, 0.3125}, {0.8125, 0.6875, 0.8125}, {0.5625, 0.4375, 0.0625}, {0.0625, 0.9375, 0.5625},
};

// Phi^{-1}(u) to 25 digits (mpmath, sqrt(2) erfinv(2u - 1) at 50 digits).
struct Quantile {
  double u, x;
};
constexpr Quantile kQuantiles[] = {
    {0.975, 1.959963984540054235524594},  {1e-15, -7.941345326170996780966744},
    {1e-10, -6.361340902404056204695376}, {0.001, -3.0902323061678135415404},
    {0.2, -0.8416212335729142051787061},  {0.7, 0.5244005127080407840382893},
    {0.999999, 4.753424308822898948193988},
};

double max_gap(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double gap = x.front() + (1.0 - x.back());
  for (std::size_t i = 1; i < x.size(); ++i) gap = std::max(gap, x[i] - x[i - 1]);
  return gap;
}

}  // namespace

TEST_CASE("sobol first sixteen points") {
  SobolGenerator gen(3);
  const auto pts = gen.next_block(16);
  for (int i = 0; i < 16; ++i)
    for (int k = 0; k < 3; ++k) CHECK(pts[3 * i + k] == kSobol16[i][k]);
  CHECK(gen.index() == 16);
}

TEST_CASE("sobol 1-D indices 1..3") {
  SobolGenerator gen(1);
  gen.seek(1);
  const auto pts = gen.next_block(3);
  CHECK(pts == std::vector<double>{0.5, 0.75, 0.25});
}

TEST_CASE("sobol seek matches sequential generation") {
  SobolGenerator a(3), b(3);
  const auto all = a.next_block(100);
  b.seek(37);
  const auto tail = b.next_block(63);
  CHECK(std::equal(tail.begin(), tail.end(), all.begin() + 3 * 37));
}

TEST_CASE("sobol rejects unsupported dimensions") {
  CHECK_THROWS_AS(SobolGenerator(0), ConfigError);
  CHECK_THROWS_AS(SobolGenerator(4), ConfigError);
}

TEST_CASE("direction table parse") {
  std::istringstream in("d s a m_i\n2 1 0 1\n3 2 1 1 3\n");
  const auto table = DirectionTable::parse(in);
  CHECK(table.dimensions() == 3);
  SobolGenerator parsed(3, table), embedded(3);
  CHECK(parsed.next_block(64) == embedded.next_block(64));
}

TEST_CASE("digital shift") {
  SUBCASE("zero mask is the identity") {
    SobolGenerator a(3), b(3);
    const std::uint32_t zero[3] = {0, 0, 0};
    b.set_shift(zero);
    CHECK(a.next_block(32) == b.next_block(32));
  }
  SUBCASE("xor twice restores the point") {
    const std::uint32_t s = 0x9e3779b9u;
    SobolGenerator plain(1), shifted(1);
    const std::uint32_t mask[1] = {s};
    shifted.set_shift(mask);
    for (int i = 0; i < 64; ++i) {
      std::uint32_t a[1], b[1];
      plain.next_raw(a);
      shifted.next_raw(b);
      CHECK((b[0] ^ s) == a[0]);
    }
  }
  SUBCASE("shifted coordinates pass a 64-bin chi-square test") {
    PseudoStream src(11, 3);
    SobolGenerator gen = apply_digital_shift(SobolGenerator(3), src);
    const std::size_t n = 1 << 14;
    const auto pts = gen.next_block(n);
    for (int k = 0; k < 3; ++k) {
      std::array<double, 64> bins{};
      for (std::size_t i = 0; i < n; ++i) bins[static_cast<std::size_t>(pts[3 * i + k] * 64)] += 1;
      const double expected = n / 64.0;
      double chi2 = 0;
      for (double b : bins) chi2 += (b - expected) * (b - expected) / expected;
      CHECK(chi2 < 103.44);  // chi-square 0.999 quantile, 63 dof
    }
  }
  SUBCASE("max 1-D gap at most twice the unshifted gap") {
    const std::size_t n = 1 << 10;
    SobolGenerator plain(3);
    const auto a = plain.next_block(n);
    PseudoStream src(5, 8);
    SobolGenerator shifted = apply_digital_shift(SobolGenerator(3), src);
    const auto b = shifted.next_block(n);
    for (int k = 0; k < 3; ++k) {
      std::vector<double> xa, xb;
      for (std::size_t i = 0; i < n; ++i) {
        xa.push_back(a[3 * i + k]);
        xb.push_back(b[3 * i + k]);
      }
      CHECK(max_gap(xb) <= 2 * max_gap(xa));
    }
  }
}

TEST_CASE("sobol balance over dyadic intervals") {
  for (int k = 1; k <= 12; ++k) {
    const std::size_t n = std::size_t{1} << k;
    SobolGenerator gen(3);
    const auto pts = gen.next_block(n);
    for (int d = 0; d < 3; ++d) {
      std::vector<int> hits(n, 0);
      for (std::size_t i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(pts[3 * i + d] * n)];
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("owen scramble keeps strata") {
  // Two inputs sharing their leading j digits keep sharing them after scrambling.
  for (std::uint64_t seed : {1ull, 77ull}) {
    const std::uint32_t a = 0xabcd1234u, b = 0xabcd0000u;
    CHECK((owen_scramble(a, seed) >> 16) == (owen_scramble(b, seed) >> 16));
  }
  CHECK(owen_scramble(0x12345678u, 3) == owen_scramble(0x12345678u, 3));
}

TEST_CASE("inverse normal cdf") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  for (const auto& q : kQuantiles) CHECK(std::abs(inverse_normal_cdf(q.u) - q.x) <= 1e-9);
  CHECK(std::abs(inverse_normal_cdf(0.975) - 1.959964) <= 1e-5);
  for (double u : {0.01, 0.2, 0.7}) CHECK(inverse_normal_cdf(u) == doctest::Approx(-inverse_normal_cdf(1 - u)).epsilon(1e-14));

  double prev = -INFINITY;
  for (int i = 1; i < 10000; ++i) {
    const double x = inverse_normal_cdf(i / 10000.0);
    CHECK_MESSAGE(x > prev, "not increasing at i = " << i);
    prev = x;
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(NAN), DomainError);
}

TEST_CASE("normal from fraction clamps the sobol origin") {
  const double lo = normal_from_fraction(0.0);
  CHECK(std::isfinite(lo));
  CHECK(lo == inverse_normal_cdf(kFractionClip));
  CHECK(normal_from_fraction(1.0) == doctest::Approx(-lo));
  CHECK_THROWS_AS(normal_from_fraction(-0.1), DomainError);
  CHECK_THROWS_AS(normal_from_fraction(1.5), DomainError);
}

TEST_CASE("pseudo normal block") {
  PseudoStream s(42, stream_id(0, 0, 0, Purpose::kNoise));
  CHECK(pseudo_normal_block(s, 0).empty());
  const std::size_t n = 1 << 20;
  const auto x = pseudo_normal_block(s, n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  CHECK(std::abs(mean) < 0.004);
  CHECK(std::abs(var - 1) < 0.006);
}

TEST_CASE("pseudo streams are reproducible and independent") {
  PseudoStream a(7, 100), b(7, 100), c(7, 101);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  const std::size_t n = 1 << 16;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = b.uniform(), y = c.uniform();
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double rho = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(rho) < 0.02);
}

TEST_CASE("stream ids separate purposes and indices") {
  CHECK(stream_id(0, 0, 0, Purpose::kNoise) != stream_id(0, 0, 0, Purpose::kShift));
  CHECK(stream_id(1, 0, 0, Purpose::kNoise) != stream_id(0, 1, 0, Purpose::kNoise));
  CHECK(stream_id(0, 1, 0, Purpose::kNoise) != stream_id(0, 0, 1, Purpose::kNoise));
}

TEST_CASE("shuffle") {
  PseudoStream s(3, 9);
  std::vector<int> empty;
  shuffle(std::span<int>(empty), s);
  CHECK(empty.empty());
  std::vector<int> one{5};
  shuffle(std::span<int>(one), s);
  CHECK(one == std::vector<int>{5});

  std::map<std::vector<int>, int> seen;
  const int trials = 6000;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> v{0, 1, 2};
    shuffle(std::span<int>(v), s);
    ++seen[v];
  }
  CHECK(seen.size() == 6);
  const double sigma = std::sqrt(trials * (1.0 / 6) * (5.0 / 6));
  for (const auto& [perm, count] : seen) CHECK(std::abs(count - trials / 6.0) < 5 * sigma);
}
