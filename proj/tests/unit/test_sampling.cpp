#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fpqmc/errors.hpp"
#include "fpqmc/normal.hpp"
#include "fpqmc/sampling.hpp"

using namespace fpqmc;

namespace {

std::vector<Vec3> velocities(std::size_t n, std::uint64_t seed) {
  PseudoPointSource src(PseudoStream(seed, 77));
  return initialize_maxwellian(n, 300, {}, GasModel{}, src);
}

std::vector<Vec3> draw(NoiseSampler& s, const std::vector<Vec3>& v, std::uint64_t step = 1, std::uint64_t cell = 0,
                       std::uint64_t rep = 0) {
  std::vector<Vec3> out(v.size());
  const CellMoments m = compute_moments(v);
  s.sample({rep, step, cell, v, &m}, out);
  return out;
}

Vec3 block_mean(const std::vector<Vec3>& b) {
  Vec3 s{};
  for (const auto& x : b) s = s + x;
  return (1.0 / static_cast<double>(b.size())) * s;
}

std::vector<double> sorted_values(const std::vector<Vec3>& b) {
  std::vector<double> x;
  for (const auto& v : b) x.insert(x.end(), v.begin(), v.end());
  std::sort(x.begin(), x.end());
  return x;
}

// The shifted Sobol' block, mapped to normals, in sequence order.
std::vector<Vec3> sobol_block(std::uint64_t seed, std::uint64_t rep, std::uint64_t step, std::uint64_t cell,
                              std::size_t n) {
  auto gen = shifted_sobol(seed, rep, step, cell, Purpose::kShift, 1);
  const auto pts = gen.next_block(n);
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = normal_from_fraction(pts[3 * i + k]);
  return out;
}

}  // namespace

TEST_CASE("strategy names") {
  for (Strategy s : all_strategies()) CHECK(parse_strategy(strategy_name(s)) == s);
  CHECK(all_strategies().size() == 6);
  CHECK_THROWS_AS(parse_strategy("sobol"), ConfigError);
  CHECK(is_quasi(Strategy::kArrayRqmc));
  CHECK(!is_quasi(Strategy::kControlVariate));
}

TEST_CASE("every strategy fills an aligned block and handles n = 0") {
  const auto v = velocities(33, 1);
  for (Strategy s : all_strategies()) {
    auto sampler = make_sampler(s, {5, PairingMode::kConsecutive, 1});
    std::vector<Vec3> none;
    sampler->sample({0, 1, 0, none, nullptr}, none);
    const auto a = draw(*sampler, v), b = draw(*sampler, v);
    CHECK(a == b);
    for (const auto& x : a)
      for (double c : x) CHECK(std::isfinite(c));
  }
}

TEST_CASE("pseudo blocks of different cells are independent") {
  PseudoSampler s(3);
  const auto v = velocities(1 << 16, 2);
  const auto a = draw(s, v, 1, 0), b = draw(s, v, 1, 1);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sxy += a[i][0] * b[i][0], sxx += a[i][0] * a[i][0], syy += b[i][0] * b[i][0];
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.02);
}

TEST_CASE("normalized") {
  NormalizedSampler s(4);
  SUBCASE("exact mean and variance") {
    const auto b = draw(s, velocities(1000, 3));
    for (int k = 0; k < 3; ++k) {
      double m = 0, v = 0;
      for (const auto& x : b) m += x[k];
      m /= b.size();
      for (const auto& x : b) v += (x[k] - m) * (x[k] - m);
      CHECK(std::abs(m) < 1e-12);
      CHECK(std::abs(v / b.size() - 1) < 1e-12);
    }
  }
  SUBCASE("two samples become +-1 in the order of the raw draws") {
    const auto v = velocities(2, 3);
    PseudoSampler raw_sampler(4);
    const auto raw = draw(raw_sampler, v), b = draw(s, v);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(b[0][k]) == doctest::Approx(1.0));
      CHECK(b[0][k] == -b[1][k]);
      CHECK((b[0][k] > 0) == (raw[0][k] > raw[1][k]));
    }
  }
  SUBCASE("single particle falls back to pseudo") {
    PseudoSampler raw_sampler(4);
    const auto v = velocities(1, 3);
    CHECK(draw(s, v) == draw(raw_sampler, v));
  }
}

TEST_CASE("antithetic") {
  const auto v = velocities(10, 5);
  SUBCASE("consecutive pairs cancel") {
    AntitheticSampler s(6, PairingMode::kConsecutive);
    const auto b = draw(s, v);
    for (std::size_t i = 0; i < 10; i += 2) CHECK(b[i] + b[i + 1] == Vec3{0, 0, 0});
    const Vec3 m = block_mean(b);
    for (double x : m) CHECK(x == 0.0);
  }
  SUBCASE("halves pair i with i + n/2 at every step") {
    AntitheticSampler s(6, PairingMode::kHalves);
    for (std::uint64_t step = 1; step <= 3; ++step) {
      const auto b = draw(s, v, step);
      for (std::size_t i = 0; i < 5; ++i) CHECK(b[i] == -b[i + 5]);
    }
  }
  SUBCASE("odd n gets one unpaired entry") {
    AntitheticSampler s(6, PairingMode::kConsecutive);
    const auto b = draw(s, velocities(7, 5));
    for (std::size_t i = 0; i < 6; i += 2) CHECK(b[i] == -b[i + 1]);
    CHECK(b[6] != -b[5]);
  }
}

TEST_CASE("qmc shuffled") {
  const auto v = velocities(1 << 12, 6);
  SUBCASE("values are the shifted sobol block in some order") {
    QmcShuffledSampler s(8, 1);
    const auto b = draw(s, v, 2, 3, 4);
    CHECK(sorted_values(b) == sorted_values(sobol_block(8, 4, 2, 3, v.size())));
    CHECK(b != sobol_block(8, 4, 2, 3, v.size()));
  }
  SUBCASE("block mean far below the monte carlo scale") {
    QmcShuffledSampler s(8, 1);
    const Vec3 m = block_mean(draw(s, v));
    for (double x : m) CHECK(std::abs(x) < 10.0 / v.size());
  }
  SUBCASE("consecutive steps use fresh shifts") {
    QmcShuffledSampler s(8, 1);
    CHECK(sorted_values(draw(s, v, 1)) != sorted_values(draw(s, v, 2)));
  }
  SUBCASE("shift averaging is unbiased") {
    QmcShuffledSampler s(8, 1);
    const auto small = velocities(64, 6);
    std::vector<double> means;
    for (std::uint64_t rep = 0; rep < 200; ++rep) means.push_back(block_mean(draw(s, small, 1, 0, rep))[0]);
    const double mu = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double var = 0;
    for (double x : means) var += (x - mu) * (x - mu);
    var /= means.size() - 1;
    CHECK(std::abs(mu) < 3 * std::sqrt(var / means.size()));
  }
}

TEST_CASE("array-rqmc") {
  SUBCASE("single particle") {
    ArrayRqmcSampler s(9, 1);
    const auto v = velocities(1, 1);
    CHECK(draw(s, v, 1, 0, 2) == sobol_block(9, 2, 1, 0, 1));
  }
  SUBCASE("identical velocities keep sequence order") {
    ArrayRqmcSampler s(9, 1);
    const std::vector<Vec3> v(20, Vec3{1, 2, 3});
    CHECK(draw(s, v) == sobol_block(9, 0, 1, 0, 20));
  }
  SUBCASE("sobol point of rank r goes to the particle of morton rank r") {
    ArrayRqmcSampler s(9, 1);
    const auto v = velocities(500, 2);
    const auto b = draw(s, v);
    const auto pts = sobol_block(9, 0, 1, 0, v.size());
    const auto order = morton_order(v, compute_moments(v));
    for (std::size_t r = 0; r < v.size(); ++r) CHECK(b[order[r]] == pts[r]);
  }
  SUBCASE("same multiset as qmc-shuffled") {
    ArrayRqmcSampler a(9, 1);
    QmcShuffledSampler q(9, 1);
    const auto v = velocities(300, 3);
    const auto ba = draw(a, v), bq = draw(q, v);
    CHECK(sorted_values(ba) == sorted_values(bq));
    // A linear observable of the block cannot tell the orderings apart.
    const Vec3 ma = block_mean(ba), mq = block_mean(bq);
    for (int k = 0; k < 3; ++k) CHECK(ma[k] == doctest::Approx(mq[k]).epsilon(1e-12));
  }
  SUBCASE("permuting the particles permutes the noise within each key group") {
    ArrayRqmcSampler s(9, 1);
    const auto v = velocities(256, 4);
    const auto m = compute_moments(v);
    const unsigned p = grid_resolution(v.size());
    auto key = [&](const Vec3& x) { return morton_encode(normalize_velocity(x, m.mean, m.stddev), p).value; };
    const auto base = draw(s, v);
    std::vector<std::size_t> perm(v.size());
    std::iota(perm.begin(), perm.end(), 0);
    PseudoStream rs(4, 4);
    for (int trial = 0; trial < 5; ++trial) {
      shuffle(std::span<std::size_t>(perm), rs);
      std::vector<Vec3> pv(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) pv[i] = v[perm[i]];
      const auto out = draw(s, pv);
      std::map<std::uint64_t, std::vector<double>> expect, got;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto k = key(pv[i]);
        got[k].insert(got[k].end(), out[i].begin(), out[i].end());
        expect[k].insert(expect[k].end(), base[perm[i]].begin(), base[perm[i]].end());
      }
      for (auto& [k, g] : got) {
        auto e = expect[k];
        std::sort(g.begin(), g.end());
        std::sort(e.begin(), e.end());
        CHECK(g == e);
      }
    }
  }
}

TEST_CASE("init sources and wall noise follow the strategy family") {
  const SamplerOptions o{3, PairingMode::kConsecutive, 1};
  auto q = make_init_source(Strategy::kArrayRqmc, o, 0, 0);
  auto p = make_init_source(Strategy::kPseudo, o, 0, 0);
  CHECK(dynamic_cast<SobolPointSource*>(q.get()) != nullptr);
  CHECK(dynamic_cast<PseudoPointSource*>(p.get()) != nullptr);
  CHECK(dynamic_cast<SobolWallNoise*>(make_wall_noise(Strategy::kQmcShuffled, o, 0, WallSide::kLower).get()) != nullptr);
  CHECK(dynamic_cast<PseudoWallNoise*>(make_wall_noise(Strategy::kPseudoNormalized, o, 0, WallSide::kUpper).get()) !=
        nullptr);
}

TEST_CASE("control variate estimate") {
  CellMoments target, control, analytic;
  target.mean = {1, 2, 3};
  control.mean = {1, 1, 1};
  analytic.energy = 5;
  target.energy = 4;
  control.energy = 3;
  const auto e = control_variate_estimate(target, control, analytic);
  CHECK(e.mean == Vec3{0, 1, 2});
  CHECK(e.energy == 6);
}
