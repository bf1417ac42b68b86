#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpqmc/ensemble.hpp"
#include "fpqmc/fp_core.hpp"
#include "fpqmc/morton.hpp"
#include "fpqmc/point_source.hpp"

namespace fpqmc {

enum class Strategy { kPseudo, kPseudoNormalized, kPseudoAntithetic, kControlVariate, kQmcShuffled, kArrayRqmc };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);  // throws ConfigError
std::vector<Strategy> all_strategies();
bool is_quasi(Strategy s);

/// Noise for the particles of one cell in one step.
struct NoiseRequest {
  std::uint64_t repetition = 0;
  std::uint64_t step = 0;
  std::uint64_t cell = 0;
  std::span<const Vec3> velocities;  // the cell's particles, in storage order
  const CellMoments* moments = nullptr;
};

/// Fills out[i] (i < request.velocities.size()) with a standard normal triple
/// for particle i of the cell.
class NoiseSampler {
 public:
  virtual ~NoiseSampler() = default;
  virtual void sample(const NoiseRequest& request, std::span<Vec3> out) = 0;
};

/// How antithetic pairs are formed: (i, i + n/2) keeps the pairing fixed over
/// a homogeneous run; (2i, 2i+1) pairs consecutive particles of the cell.
enum class PairingMode { kHalves, kConsecutive };

struct SamplerOptions {
  std::uint64_t seed = 0;
  PairingMode pairing = PairingMode::kConsecutive;
  std::uint64_t sobol_start = 1;  // first Sobol' index used per cell and step
};

class PseudoSampler : public NoiseSampler {
 public:
  explicit PseudoSampler(std::uint64_t seed) : seed_(seed) {}
  void sample(const NoiseRequest& request, std::span<Vec3> out) override;

 private:
  std::uint64_t seed_;
};

/// Pseudo block shifted and scaled per component to empirical mean 0 and
/// population variance 1. Blocks of fewer than two entries are left as drawn.
class NormalizedSampler final : public NoiseSampler {
 public:
  explicit NormalizedSampler(std::uint64_t seed) : pseudo_(seed) {}
  void sample(const NoiseRequest& request, std::span<Vec3> out) override;

 private:
  PseudoSampler pseudo_;
};

class AntitheticSampler final : public NoiseSampler {
 public:
  AntitheticSampler(std::uint64_t seed, PairingMode mode) : seed_(seed), mode_(mode) {}
  void sample(const NoiseRequest& request, std::span<Vec3> out) override;

 private:
  std::uint64_t seed_;
  PairingMode mode_;
};

/// Fresh digitally shifted Sobol' points mapped through the inverse normal
/// CDF, in random order.
class QmcShuffledSampler final : public NoiseSampler {
 public:
  QmcShuffledSampler(std::uint64_t seed, std::uint64_t start) : seed_(seed), start_(start) {}
  void sample(const NoiseRequest& request, std::span<Vec3> out) override;

 private:
  std::uint64_t seed_;
  std::uint64_t start_;
  std::vector<double> points_;
};

/// Sobol' point of rank r goes to the particle whose velocity has Morton
/// rank r within the cell.
class ArrayRqmcSampler final : public NoiseSampler {
 public:
  ArrayRqmcSampler(std::uint64_t seed, std::uint64_t start) : seed_(seed), start_(start) {}
  void sample(const NoiseRequest& request, std::span<Vec3> out) override;

 private:
  std::uint64_t seed_;
  std::uint64_t start_;
  std::vector<double> points_;
  std::vector<std::uint64_t> keys_;
  RadixSorter sorter_;
};

/// Morton ranks of the velocities: result[r] is the index of the particle
/// with rank r (stable for equal keys).
std::vector<std::uint32_t> morton_order(std::span<const Vec3> velocities, const CellMoments& moments);

/// Shifted 3-D Sobol' generator for the (repetition, step, cell) key,
/// positioned at `start`.
SobolGenerator shifted_sobol(std::uint64_t seed, std::uint64_t repetition, std::uint64_t step, std::uint64_t cell,
                             Purpose shift_purpose, std::uint64_t start);

/// Sampler for a strategy. The control variate uses pseudo noise; its
/// estimator lives in the simulation.
std::unique_ptr<NoiseSampler> make_sampler(Strategy s, const SamplerOptions& options);

/// Uniform source for initial velocities (or positions) of one cell: shifted
/// Sobol' points for the quasi strategies, pseudo uniforms otherwise.
std::unique_ptr<PointSource> make_init_source(Strategy s, const SamplerOptions& options, std::uint64_t repetition,
                                              std::uint64_t cell, bool positions = false);

/// Boundary-cell noise stream for one wall of one repetition.
std::unique_ptr<WallNoise> make_wall_noise(Strategy s, const SamplerOptions& options, std::uint64_t repetition,
                                           WallSide side);

/// Control-variate estimate from target and control moments and the control
/// process's analytic moments: target - control + analytic, per moment.
CellMoments control_variate_estimate(const CellMoments& target, const CellMoments& control,
                                     const CellMoments& analytic);

}  // namespace fpqmc
