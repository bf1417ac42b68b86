#include "fpqmc/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fpqmc/errors.hpp"
#include "fpqmc/normal.hpp"

namespace fpqmc {
namespace {

constexpr std::array<std::string_view, 6> kNames = {"pseudo",          "pseudo-normalized", "pseudo-antithetic",
                                                    "control-variate", "qmc-shuffled",      "array-rqmc"};

PseudoStream noise_stream(std::uint64_t seed, const NoiseRequest& r, Purpose p) {
  return PseudoStream(seed, stream_id(r.repetition, r.step, r.cell, p));
}

void fill_pseudo(PseudoStream& stream, std::span<Vec3> out) {
  for (Vec3& xi : out)
    for (double& x : xi) x = stream.normal();
}

}  // namespace

std::string_view strategy_name(Strategy s) { return kNames[static_cast<std::size_t>(s)]; }

Strategy parse_strategy(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Strategy>(i);
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected pseudo, pseudo-normalized, pseudo-antithetic, control-variate, qmc-shuffled, "
                    "array-rqmc)");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::kPseudo,         Strategy::kPseudoNormalized, Strategy::kPseudoAntithetic,
          Strategy::kControlVariate, Strategy::kQmcShuffled,      Strategy::kArrayRqmc};
}

bool is_quasi(Strategy s) { return s == Strategy::kQmcShuffled || s == Strategy::kArrayRqmc; }

void PseudoSampler::sample(const NoiseRequest& request, std::span<Vec3> out) {
  auto stream = noise_stream(seed_, request, Purpose::kNoise);
  fill_pseudo(stream, out.first(request.velocities.size()));
}

void NormalizedSampler::sample(const NoiseRequest& request, std::span<Vec3> out) {
  pseudo_.sample(request, out);
  const std::size_t n = request.velocities.size();
  if (n < 2) return;
  auto block = out.first(n);
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const Vec3& xi : block) mean += xi[k];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const Vec3& xi : block) ss += (xi[k] - mean) * (xi[k] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    for (Vec3& xi : block) xi[k] = (xi[k] - mean) * scale;
  }
}

void AntitheticSampler::sample(const NoiseRequest& request, std::span<Vec3> out) {
  const std::size_t n = request.velocities.size();
  auto stream = noise_stream(seed_, request, Purpose::kNoise);
  const std::size_t pairs = n / 2;
  for (std::size_t i = 0; i < pairs; ++i) {
    Vec3 xi;
    for (double& x : xi) x = stream.normal();
    const std::size_t a = mode_ == PairingMode::kHalves ? i : 2 * i;
    const std::size_t b = mode_ == PairingMode::kHalves ? i + pairs : 2 * i + 1;
    out[a] = xi;
    out[b] = -xi;
  }
  if (n % 2 == 1)
    for (double& x : out[n - 1]) x = stream.normal();
}

SobolGenerator shifted_sobol(std::uint64_t seed, std::uint64_t repetition, std::uint64_t step, std::uint64_t cell,
                             Purpose shift_purpose, std::uint64_t start) {
  PseudoStream shift(seed, stream_id(repetition, step, cell, shift_purpose));
  SobolGenerator gen = apply_digital_shift(SobolGenerator(3), shift);
  gen.seek(start);
  return gen;
}

void QmcShuffledSampler::sample(const NoiseRequest& request, std::span<Vec3> out) {
  const std::size_t n = request.velocities.size();
  if (n == 0) return;
  SobolGenerator gen = shifted_sobol(seed_, request.repetition, request.step, request.cell, Purpose::kShift, start_);
  points_.resize(3 * n);
  gen.next_block(n, points_);
  auto block = out.first(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) block[i][k] = normal_from_fraction(points_[3 * i + k]);
  auto stream = noise_stream(seed_, request, Purpose::kShuffle);
  shuffle(block, stream);
}

std::vector<std::uint32_t> morton_order(std::span<const Vec3> velocities, const CellMoments& moments) {
  std::vector<std::uint64_t> keys(velocities.size());
  const unsigned p = grid_resolution(std::max<std::size_t>(velocities.size(), 1));
  for (std::size_t i = 0; i < velocities.size(); ++i)
    keys[i] = morton_encode(normalize_velocity(velocities[i], moments.mean, moments.stddev), p).value;
  return radix_sort_keys(keys, 3 * p);
}

void ArrayRqmcSampler::sample(const NoiseRequest& request, std::span<Vec3> out) {
  const std::size_t n = request.velocities.size();
  if (n == 0) return;
  CellMoments local;
  const CellMoments* m = request.moments;
  if (m == nullptr) {
    local = compute_moments(request.velocities);
    m = &local;
  }
  const unsigned p = grid_resolution(n);
  keys_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    keys_[i] = morton_encode(normalize_velocity(request.velocities[i], m->mean, m->stddev), p).value;
  const auto order = sorter_.sort(keys_, 3 * p);

  SobolGenerator gen = shifted_sobol(seed_, request.repetition, request.step, request.cell, Purpose::kShift, start_);
  points_.resize(3 * n);
  gen.next_block(n, points_);
  for (std::size_t r = 0; r < n; ++r) {
    Vec3& xi = out[order[r]];
    for (int k = 0; k < 3; ++k) xi[k] = normal_from_fraction(points_[3 * r + k]);
  }
}

std::unique_ptr<NoiseSampler> make_sampler(Strategy s, const SamplerOptions& o) {
  switch (s) {
    case Strategy::kPseudo:
    case Strategy::kControlVariate:
      return std::make_unique<PseudoSampler>(o.seed);
    case Strategy::kPseudoNormalized:
      return std::make_unique<NormalizedSampler>(o.seed);
    case Strategy::kPseudoAntithetic:
      return std::make_unique<AntitheticSampler>(o.seed, o.pairing);
    case Strategy::kQmcShuffled:
      return std::make_unique<QmcShuffledSampler>(o.seed, o.sobol_start);
    case Strategy::kArrayRqmc:
      return std::make_unique<ArrayRqmcSampler>(o.seed, o.sobol_start);
  }
  throw ConfigError("unknown strategy");
}

std::unique_ptr<PointSource> make_init_source(Strategy s, const SamplerOptions& o, std::uint64_t repetition,
                                              std::uint64_t cell, bool positions) {
  if (is_quasi(s)) {
    const Purpose p = positions ? Purpose::kInitPositionShift : Purpose::kInitShift;
    return std::make_unique<SobolPointSource>(shifted_sobol(o.seed, repetition, 0, cell, p, o.sobol_start));
  }
  const Purpose p = positions ? Purpose::kInitPosition : Purpose::kInitVelocity;
  return std::make_unique<PseudoPointSource>(PseudoStream(o.seed, stream_id(repetition, 0, cell, p)));
}

std::unique_ptr<WallNoise> make_wall_noise(Strategy s, const SamplerOptions& o, std::uint64_t repetition,
                                           WallSide side) {
  const auto cell = static_cast<std::uint64_t>(side);
  if (is_quasi(s))
    return std::make_unique<SobolWallNoise>(shifted_sobol(o.seed, repetition, 0, cell, Purpose::kWallShift, 0),
                                            o.sobol_start);
  return std::make_unique<PseudoWallNoise>(PseudoStream(o.seed, stream_id(repetition, 0, cell, Purpose::kWall)));
}

CellMoments control_variate_estimate(const CellMoments& target, const CellMoments& control,
                                     const CellMoments& analytic) {
  CellMoments e = target;
  e.energy = target.energy - control.energy + analytic.energy;
  for (int k = 0; k < 3; ++k) {
    e.mean[k] = target.mean[k] - control.mean[k] + analytic.mean[k];
    e.heat_flux[k] = target.heat_flux[k] - control.heat_flux[k] + analytic.heat_flux[k];
    for (int l = 0; l < 3; ++l) e.stress[k][l] = target.stress[k][l] - control.stress[k][l] + analytic.stress[k][l];
  }
  return e;
}

}  // namespace fpqmc
