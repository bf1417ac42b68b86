#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fpqmc/ensemble.hpp"
#include "fpqmc/fp_core.hpp"
#include "fpqmc/sampling.hpp"

namespace fpqmc {

/// The twelve recorded quantities, in output order.
inline constexpr std::size_t kQuantityCount = 12;
enum class Quantity : std::size_t {
  kMeanX, kMeanY, kMeanZ, kEnergy,
  kSigmaXX, kSigmaYY, kSigmaXY, kSigmaXZ, kSigmaYZ,
  kHeatX, kHeatY, kHeatZ,
};

std::string_view quantity_name(std::size_t q);
std::string_view quantity_name(Quantity q);
Quantity parse_quantity(std::string_view name);

/// Moments in units of c0 = sqrt(k T0 / m): velocity / c0, energy and
/// stress / c0^2, heat flux / c0^3.
std::array<double, kQuantityCount> scaled_quantities(const CellMoments& m, double c0);

/// kFrozen uses one fixed coefficient set everywhere; kLocal recomputes
/// (tau, mean, eps) from each cell's moments every step.
enum class CoefficientMode { kFrozen, kLocal };
enum class Integrator { kExact, kEulerMaruyama };

struct StepSettings {
  double dt = 1e-4;
  CoefficientMode mode = CoefficientMode::kLocal;
  Integrator integrator = Integrator::kExact;
  FPCoefficients frozen;
  GasModel gas;
  bool transport = false;  // free flight and walls (inhomogeneous runs)
  Channel channel;
};

/// One repetition of Algorithm 1: per cell moments, coefficients, noise and
/// velocity update, then transport with walls and cell reassignment.
class Simulation {
 public:
  Simulation(ParticleEnsemble ensemble, Grid1D grid, StepSettings settings, NoiseSampler& sampler,
             std::uint64_t repetition, WallNoise* lower = nullptr, WallNoise* upper = nullptr);

  /// Couples a control process (one velocity per particle) evolved with the
  /// same noise and the frozen coefficients; `analytic` are its exact moments.
  void attach_control(std::vector<Vec3> control, const CellMoments& analytic);
  bool has_control() const { return analytic_.has_value(); }

  void step();
  std::uint64_t steps_taken() const { return step_; }

  const ParticleEnsemble& ensemble() const { return ensemble_; }
  const Grid1D& grid() const { return grid_; }

  /// Plain per-cell moments of the current state.
  const std::vector<CellMoments>& moments() const { return moments_; }

  /// Reported per-cell estimates (control-variate corrected when a control
  /// process is attached).
  std::vector<CellMoments> estimates() const;

 private:
  void refresh_moments();

  ParticleEnsemble ensemble_;
  Grid1D grid_;
  StepSettings settings_;
  NoiseSampler* sampler_;
  std::uint64_t repetition_;
  WallNoise* lower_;
  WallNoise* upper_;
  std::size_t total_particles_;
  std::uint64_t step_ = 0;
  std::vector<CellMoments> moments_;
  std::vector<CellMoments> control_moments_;
  std::optional<CellMoments> analytic_;
  std::vector<Vec3> noise_;
};

}  // namespace fpqmc
