#pragma once

#include <memory>
#include <span>

#include "fpqmc/ensemble.hpp"
#include "fpqmc/gas.hpp"
#include "fpqmc/rng.hpp"
#include "fpqmc/sobol.hpp"
#include "fpqmc/vec3.hpp"

namespace fpqmc {

/// Drift target and diffusion strength of the linear Fokker-Planck model.
struct FPCoefficients {
  double tau = 1.0;  // s
  Vec3 mean{};       // m/s
  double energy = 0.0;  // m^2/s^2
};

/// tau = 2 mu(T) / (n k T) with T = (2/3)(m/k) eps. `density` overrides the
/// gas number density when positive. Throws DegenerateCellError for eps <= 0.
double relaxation_time(const CellMoments& moments, const GasModel& gas, double density = 0.0);
double relaxation_time_at_temperature(double temperature, const GasModel& gas, double density = 0.0);

/// Per-step constants of the exact update: decay = exp(-dt/tau) and
/// amplitude = sqrt((2 eps / 3)(1 - exp(-2 dt/tau))).
struct OUFactors {
  double decay = 1.0;
  double amplitude = 0.0;
};
OUFactors ou_factors(const FPCoefficients& c, double dt);

/// Exact Ornstein-Uhlenbeck transition over dt.
Vec3 ou_update(const Vec3& v, const FPCoefficients& c, double dt, const Vec3& xi);
Vec3 ou_update(const Vec3& v, const Vec3& mean, const OUFactors& f, const Vec3& xi);
void ou_update_block(std::span<Vec3> v, const Vec3& mean, const OUFactors& f, std::span<const Vec3> xi);

/// Euler-Maruyama step: v - (dt/tau)(v - mean) + sqrt(4 eps dt / (3 tau)) xi.
Vec3 em_update(const Vec3& v, const FPCoefficients& c, double dt, const Vec3& xi);

inline Vec3 free_flight(const Vec3& x, const Vec3& v, double dt) { return x + dt * v; }

enum class WallSide { kLower, kUpper };

/// Diffuse wall at x = 0 (lower) or x = L (upper).
struct WallSpec {
  double temperature = 300.0;  // K
  Vec3 velocity{};             // x component must be zero
};

/// One boundary draw: a uniform for the normal speed and two standard normal
/// deviates for the tangential components.
struct WallDraw {
  double uniform = 0.5;
  double tangential[2] = {0.0, 0.0};
};

class WallNoise {
 public:
  virtual ~WallNoise() = default;
  virtual WallDraw next() = 0;
};

class PseudoWallNoise final : public WallNoise {
 public:
  explicit PseudoWallNoise(PseudoStream stream) : stream_(std::move(stream)) {}
  WallDraw next() override;

 private:
  PseudoStream stream_;
};

/// Sequential, digitally shifted 3-D Sobol' stream owned by one boundary cell,
/// generated in blocks.
class SobolWallNoise final : public WallNoise {
 public:
  static constexpr std::size_t kBlock = 4096;
  SobolWallNoise(SobolGenerator gen, std::uint64_t start_index);
  WallDraw next() override;

 private:
  SobolGenerator gen_;
  std::vector<double> buffer_;
  std::size_t pos_ = 0;
};

/// Velocity drawn from the half-range Maxwellian of a wall, pointing into the
/// domain. The uniform is clamped to >= 2^-32.
Vec3 diffuse_velocity(const WallSpec& wall, WallSide side, const WallDraw& draw, const GasModel& gas);

struct Channel {
  double length = 1.0;
  WallSpec lower;
  WallSpec upper;
};

struct WallHit {
  Vec3 position{};
  Vec3 velocity{};
  double remaining = 0.0;
};

/// Moves the particle to the crossing of `side` within `remaining`, resamples
/// its velocity there and returns the time left. Precondition: the straight
/// path crosses that wall.
WallHit wall_interaction(const Vec3& position, const Vec3& velocity, double remaining, const Channel& channel,
                         WallSide side, WallNoise& noise, const GasModel& gas);

inline constexpr int kMaxWallCrossings = 32;

/// Free flight over dt with diffuse reflections at both walls. Throws
/// StepError after kMaxWallCrossings crossings.
void transport(Vec3& position, Vec3& velocity, double dt, const Channel& channel, WallNoise& lower,
               WallNoise& upper, const GasModel& gas);

}  // namespace fpqmc
