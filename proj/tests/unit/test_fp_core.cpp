#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "fpqmc/errors.hpp"
#include "fpqmc/fp_core.hpp"
#include "fpqmc/sampling.hpp"
#include "fpqmc/simulation.hpp"

using namespace fpqmc;

namespace {

class FixedWallNoise final : public WallNoise {
 public:
  explicit FixedWallNoise(WallDraw d) : draw_(d) {}
  WallDraw next() override { return draw_; }

 private:
  WallDraw draw_;
};

}  // namespace

TEST_CASE("relaxation time") {
  const GasModel gas;
  const double tau = relaxation_time_at_temperature(300, gas);
  CHECK(tau == doctest::Approx(1.1e-3).epsilon(0.01));
  CHECK(relaxation_time_at_temperature(300, gas, 2 * gas.number_density) == doctest::Approx(tau / 2));

  GasModel half = gas;
  half.viscosity_exponent = 0.5;
  CHECK(relaxation_time_at_temperature(1200, half) ==
        doctest::Approx(relaxation_time_at_temperature(300, half) / 2));

  CellMoments m;
  m.energy = gas.energy(300);
  CHECK(relaxation_time(m, gas) == doctest::Approx(tau).epsilon(1e-12));
  m.energy = 0;
  CHECK_THROWS_AS(relaxation_time(m, gas), DegenerateCellError);
}

TEST_CASE("domain length from knudsen number") {
  CHECK(GasModel{}.domain_length(0.17) == doctest::Approx(0.761).epsilon(0.002));
}

TEST_CASE("ou update") {
  const FPCoefficients c{1e-3, {10, 0, -5}, 2e5};
  const Vec3 v{300, -200, 100}, xi{0.3, -1.2, 2.0};
  CHECK(ou_update(v, c, 0.0, xi) == v);
  CHECK(ou_update(v, c, 1e6, {0, 0, 0}) == c.mean);
  CHECK_THROWS_AS(ou_factors({0.0, {}, 1.0}, 1e-4), ConfigError);

  SUBCASE("one-step distribution") {
    const double dt = 2e-4;
    const auto f = ou_factors(c, dt);
    PseudoStream s(5, 5);
    const std::size_t n = 1 << 20;
    double sum[3] = {}, sq[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 w = ou_update(v, c.mean, f, {s.normal(), s.normal(), s.normal()});
      for (int k = 0; k < 3; ++k) sum[k] += w[k], sq[k] += w[k] * w[k];
    }
    const double var = 2 * c.energy / 3 * (1 - std::exp(-2 * dt / c.tau));
    for (int k = 0; k < 3; ++k) {
      const double mean = sum[k] / n, sv = sq[k] / n - mean * mean;
      const double expect = c.mean[k] + (v[k] - c.mean[k]) * std::exp(-dt / c.tau);
      CHECK(std::abs(mean - expect) < 3 * std::sqrt(var / n));
      CHECK(std::abs(sv - var) < 3 * var * std::sqrt(2.0 / n));
    }
  }

  SUBCASE("equilibrium ensemble keeps its energy") {
    const std::size_t n = 1 << 16;
    const GasModel gas;
    const FPCoefficients eq{1e-3, {}, gas.energy(300)};
    PseudoPointSource src(PseudoStream(9, 1));
    auto vel = initialize_maxwellian(n, 300, {}, gas, src);
    PseudoStream s(9, 2);
    const auto f = ou_factors(eq, 1e-4);
    for (auto& w : vel) w = ou_update(w, eq.mean, f, {s.normal(), s.normal(), s.normal()});
    const double kt = gas.boltzmann * 300 / gas.mass;
    const double se = std::sqrt(1.5) * kt / std::sqrt(double(n));
    CHECK(std::abs(compute_moments(vel).energy - eq.energy) < 3 * se);
  }
}

TEST_CASE("euler-maruyama update") {
  const FPCoefficients c{1e-3, {10, 0, -5}, 2e5};
  const Vec3 v{300, -200, 100};
  CHECK(em_update(v, c, 0.0, {1, 1, 1}) == v);
  CHECK(em_update(c.mean, c, 1e-4, {0, 0, 0}) == c.mean);

  // Drift error is O(dt^2): one decade in dt is two decades in error.
  auto gap = [&](double r, const Vec3& xi) { return norm(em_update(v, c, r * c.tau, xi) - ou_update(v, c, r * c.tau, xi)); };
  const double drift_ratio = gap(1e-2, {0, 0, 0}) / gap(1e-3, {0, 0, 0});
  CHECK(drift_ratio == doctest::Approx(100).epsilon(0.02));
  // With noise the amplitude mismatch is O(dt^1.5).
  const double noisy_ratio = gap(1e-2, {0.5, -0.5, 1}) / gap(1e-3, {0.5, -0.5, 1});
  CHECK(noisy_ratio > 25);
}

TEST_CASE("free flight") {
  CHECK(free_flight({0.1, 0, 0}, {100, 0, 0}, 1e-4)[0] == doctest::Approx(0.11));
  CHECK(free_flight({0.1, 0.2, 0.3}, {100, 5, 5}, 0.0) == Vec3{0.1, 0.2, 0.3});
  CHECK(free_flight({0.1, 0.2, 0.3}, {0, 0, 0}, 1.0) == Vec3{0.1, 0.2, 0.3});
}

TEST_CASE("diffuse wall") {
  const GasModel gas;
  const WallSpec wall{300, {0, 100, 0}};
  SUBCASE("U = 1 leaves only tangential motion") {
    WallDraw d;
    d.uniform = 1.0;
    d.tangential[0] = 1.0;
    d.tangential[1] = -2.0;
    const Vec3 v = diffuse_velocity(wall, WallSide::kLower, d, gas);
    const double s = gas.thermal_speed(300);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(100 + s));
    CHECK(v[2] == doctest::Approx(-2 * s));
  }
  SUBCASE("cold still wall absorbs all motion") {
    WallDraw d;
    d.uniform = 0.3;
    d.tangential[0] = 1.5;
    const Vec3 v = diffuse_velocity({0.0, {}}, WallSide::kUpper, d, gas);
    CHECK(norm(v) == 0.0);
  }
  SUBCASE("U = 0 is clamped to a finite speed") {
    WallDraw d;
    d.uniform = 0.0;
    const Vec3 lo = diffuse_velocity(wall, WallSide::kLower, d, gas);
    const Vec3 up = diffuse_velocity(wall, WallSide::kUpper, d, gas);
    CHECK(std::isfinite(lo[0]));
    CHECK(lo[0] == doctest::Approx(gas.thermal_speed(300) * std::sqrt(64 * std::log(2.0))));
    CHECK(up[0] == -lo[0]);
  }
}

TEST_CASE("wall interaction and transport") {
  const GasModel gas;
  const Channel ch{1.0, {300, {}}, {300, {0, 100, 0}}};
  WallDraw d;
  d.uniform = std::exp(-0.5);  // normal speed = one thermal speed
  FixedWallNoise noise(d);
  const double s = gas.thermal_speed(300);

  const WallHit hit = wall_interaction({0.9, 0, 0}, {200, 0, 0}, 1e-3, ch, WallSide::kUpper, noise, gas);
  CHECK(hit.position[0] == 1.0);
  CHECK(hit.remaining == doctest::Approx(5e-4));
  CHECK(hit.velocity[0] == doctest::Approx(-s));
  CHECK(hit.velocity[1] == doctest::Approx(100));

  Vec3 x{0.9, 0, 0}, v{200, 0, 0};
  FixedWallNoise lower(d), upper(d);
  transport(x, v, 1e-3, ch, lower, upper, gas);
  CHECK(x[0] == doctest::Approx(1.0 - 5e-4 * s));
  CHECK(v[0] == doctest::Approx(-s));

  SUBCASE("runaway crossings are an error") {
    WallDraw fast;
    fast.uniform = 1e-9;
    FixedWallNoise a(fast), b(fast);
    Vec3 p{0.5e-9, 0, 0}, w{1000, 0, 0};
    CHECK_THROWS_AS(transport(p, w, 1.0, Channel{1e-9, {}, {}}, a, b, gas), StepError);
  }
}

TEST_CASE("sobol wall noise streams across blocks") {
  SobolGenerator gen(3);
  SobolWallNoise noise(gen, 1);
  SobolGenerator check(3);
  check.seek(1);
  const auto pts = check.next_block(SobolWallNoise::kBlock + 5);
  for (std::size_t i = 0; i < SobolWallNoise::kBlock + 5; ++i) {
    const WallDraw dr = noise.next();
    REQUIRE(dr.uniform == 1.0 - pts[3 * i]);
    REQUIRE(dr.uniform > 0.0);
  }
}

TEST_CASE("simulation step") {
  const GasModel gas;
  PseudoPointSource src(PseudoStream(1, 1));
  const auto vel = initialize_maxwellian(256, 300, {}, gas, src);
  const std::vector<Vec3> pos(256, Vec3{0.5, 0, 0});
  StepSettings st;
  st.mode = CoefficientMode::kLocal;

  SUBCASE("same seed gives identical ensembles") {
    PseudoSampler a(3), b(3);
    Simulation s1({pos, vel}, {1, 1.0}, st, a, 0), s2({pos, vel}, {1, 1.0}, st, b, 0);
    for (int i = 0; i < 5; ++i) s1.step(), s2.step();
    CHECK(s1.ensemble().velocity == s2.ensemble().velocity);
    CHECK(s1.steps_taken() == 5);
  }
  SUBCASE("dt = 0 changes nothing") {
    st.dt = 0;
    PseudoSampler a(3);
    Simulation sim({pos, vel}, {1, 1.0}, st, a, 0);
    sim.step();
    CHECK(sim.ensemble().velocity == vel);
  }
  SUBCASE("control variate needs frozen homogeneous runs") {
    PseudoSampler a(3);
    Simulation sim({pos, vel}, {1, 1.0}, st, a, 0);
    CHECK_THROWS_AS(sim.attach_control(vel, {}), ConfigError);
  }
  SUBCASE("perfect control gives the analytic moments") {
    st.mode = CoefficientMode::kFrozen;
    st.frozen = {1e-3, {}, gas.energy(300)};
    PseudoSampler a(3);
    Simulation sim({pos, vel}, {1, 1.0}, st, a, 0);
    CellMoments analytic;
    analytic.energy = gas.energy(300);
    sim.attach_control(vel, analytic);
    sim.step();
    const auto e = sim.estimates()[0];
    CHECK(e.energy == doctest::Approx(analytic.energy).epsilon(1e-12));
    CHECK(std::abs(e.mean[1]) < 1e-9);
  }
}

TEST_CASE("equilibrium box with diffuse walls") {
  const GasModel gas;
  const std::size_t n = 1 << 12, cells = 4;
  const double length = gas.domain_length(0.17);
  PseudoPointSource vsrc(PseudoStream(2, 1)), xsrc(PseudoStream(2, 2));
  const auto vel = initialize_maxwellian(n, 300, {}, gas, vsrc);
  std::vector<Vec3> pos(n);
  std::array<double, 3> u;
  for (auto& p : pos) {
    xsrc.next(u);
    p = {u[0] * length, 0, 0};
  }
  StepSettings st;
  st.transport = true;
  st.channel = {length, {300, {}}, {300, {}}};
  PseudoSampler sampler(2);
  PseudoWallNoise lower(PseudoStream(2, 3)), upper(PseudoStream(2, 4));
  Simulation sim({pos, vel}, {cells, length}, st, sampler, 0, &lower, &upper);
  double energy = 0;
  const int steps = 200;
  for (int t = 0; t < steps; ++t) {
    sim.step();
    CHECK(sim.ensemble().size() == n);
    for (std::size_t j = 0; j < cells; ++j) energy += sim.moments()[j].energy;
  }
  energy /= steps * cells;
  CHECK(gas.temperature(energy) == doctest::Approx(300).epsilon(0.02));
}

TEST_CASE("scaled quantities") {
  CellMoments m;
  m.mean = {2, 4, 6};
  m.energy = 8;
  m.stress[0][1] = m.stress[1][0] = 4;
  m.heat_flux = {16, 0, 0};
  const auto q = scaled_quantities(m, 2.0);
  CHECK(q[static_cast<std::size_t>(Quantity::kMeanY)] == 2);
  CHECK(q[static_cast<std::size_t>(Quantity::kEnergy)] == 2);
  CHECK(q[static_cast<std::size_t>(Quantity::kSigmaXY)] == 1);
  CHECK(q[static_cast<std::size_t>(Quantity::kHeatX)] == 2);
  CHECK(quantity_name(Quantity::kSigmaYZ) == "sigma_yz");
  CHECK(parse_quantity("heat_z") == Quantity::kHeatZ);
  CHECK_THROWS_AS(parse_quantity("sigma_zz"), ConfigError);
}
