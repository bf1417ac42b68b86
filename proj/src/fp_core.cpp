#include "fpqmc/fp_core.hpp"

#include <algorithm>
#include <cmath>

#include "fpqmc/errors.hpp"
#include "fpqmc/normal.hpp"

namespace fpqmc {

double relaxation_time_at_temperature(double temperature, const GasModel& gas, double density) {
  if (!(temperature > 0.0)) throw DegenerateCellError("relaxation time needs a positive temperature");
  const double n = density > 0.0 ? density : gas.number_density;
  const double pressure = n * gas.boltzmann * temperature;
  return 2.0 * gas.viscosity(temperature) / pressure;
}

double relaxation_time(const CellMoments& moments, const GasModel& gas, double density) {
  if (!(moments.energy > 0.0)) throw DegenerateCellError("relaxation time needs positive energy");
  return relaxation_time_at_temperature(gas.temperature(moments.energy), gas, density);
}

OUFactors ou_factors(const FPCoefficients& c, double dt) {
  if (!(c.tau > 0.0)) throw ConfigError("relaxation time must be positive");
  const double r = dt / c.tau;
  return {std::exp(-r), std::sqrt(2.0 * c.energy / 3.0 * -std::expm1(-2.0 * r))};
}

Vec3 ou_update(const Vec3& v, const Vec3& mean, const OUFactors& f, const Vec3& xi) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) out[k] = mean[k] + (v[k] - mean[k]) * f.decay + f.amplitude * xi[k];
  return out;
}

Vec3 ou_update(const Vec3& v, const FPCoefficients& c, double dt, const Vec3& xi) {
  return ou_update(v, c.mean, ou_factors(c, dt), xi);
}

void ou_update_block(std::span<Vec3> v, const Vec3& mean, const OUFactors& f, std::span<const Vec3> xi) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ou_update(v[i], mean, f, xi[i]);
}

Vec3 em_update(const Vec3& v, const FPCoefficients& c, double dt, const Vec3& xi) {
  const double r = dt / c.tau;
  const double amp = std::sqrt(4.0 * c.energy * dt / (3.0 * c.tau));
  Vec3 out;
  for (int k = 0; k < 3; ++k) out[k] = v[k] - r * (v[k] - c.mean[k]) + amp * xi[k];
  return out;
}

WallDraw PseudoWallNoise::next() {
  WallDraw d;
  d.uniform = stream_.uniform();
  d.tangential[0] = stream_.normal();
  d.tangential[1] = stream_.normal();
  return d;
}

SobolWallNoise::SobolWallNoise(SobolGenerator gen, std::uint64_t start_index) : gen_(std::move(gen)) {
  if (gen_.dimensions() < 3) throw ConfigError("wall noise needs a 3-D Sobol' generator");
  gen_.seek(start_index);
}

WallDraw SobolWallNoise::next() {
  if (pos_ >= buffer_.size()) {
    buffer_ = gen_.next_block(kBlock);
    pos_ = 0;
  }
  const double* u = buffer_.data() + pos_;
  pos_ += 3;
  WallDraw d;
  d.uniform = 1.0 - u[0];  // in (0, 1]
  d.tangential[0] = normal_from_fraction(u[1]);
  d.tangential[1] = normal_from_fraction(u[2]);
  return d;
}

Vec3 diffuse_velocity(const WallSpec& wall, WallSide side, const WallDraw& draw, const GasModel& gas) {
  const double s = gas.thermal_speed(wall.temperature);
  const double u = std::max(draw.uniform, 0x1p-32);
  const double normal = s * std::sqrt(-2.0 * std::log(u));
  return {side == WallSide::kLower ? normal : -normal, wall.velocity[1] + s * draw.tangential[0],
          wall.velocity[2] + s * draw.tangential[1]};
}

WallHit wall_interaction(const Vec3& position, const Vec3& velocity, double remaining, const Channel& channel,
                         WallSide side, WallNoise& noise, const GasModel& gas) {
  const double plane = side == WallSide::kLower ? 0.0 : channel.length;
  const double tc = std::clamp((plane - position[0]) / velocity[0], 0.0, remaining);
  WallHit hit;
  hit.position = free_flight(position, velocity, tc);
  hit.position[0] = plane;
  hit.velocity = diffuse_velocity(side == WallSide::kLower ? channel.lower : channel.upper, side, noise.next(), gas);
  hit.remaining = remaining - tc;
  return hit;
}

void transport(Vec3& position, Vec3& velocity, double dt, const Channel& channel, WallNoise& lower,
               WallNoise& upper, const GasModel& gas) {
  double remaining = dt;
  for (int crossings = 0;; ++crossings) {
    const double x = position[0] + remaining * velocity[0];
    if (x >= 0.0 && x <= channel.length) {
      position = free_flight(position, velocity, remaining);
      position[0] = x;
      return;
    }
    if (crossings >= kMaxWallCrossings) throw StepError("particle exceeded the wall-crossing limit in one step");
    const WallSide side = x < 0.0 ? WallSide::kLower : WallSide::kUpper;
    const WallHit hit =
        wall_interaction(position, velocity, remaining, channel, side, side == WallSide::kLower ? lower : upper, gas);
    position = hit.position;
    velocity = hit.velocity;
    remaining = hit.remaining;
  }
}

}  // namespace fpqmc
