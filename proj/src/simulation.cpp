#include "fpqmc/simulation.hpp"

#include <string>

#include "fpqmc/errors.hpp"

namespace fpqmc {
namespace {

constexpr std::array<std::string_view, kQuantityCount> kQuantityNames = {
    "mean_x",   "mean_y",   "mean_z",   "energy", "sigma_xx", "sigma_yy",
    "sigma_xy", "sigma_xz", "sigma_yz", "heat_x", "heat_y",   "heat_z"};

}  // namespace

std::string_view quantity_name(std::size_t q) { return kQuantityNames.at(q); }
std::string_view quantity_name(Quantity q) { return quantity_name(static_cast<std::size_t>(q)); }

Quantity parse_quantity(std::string_view name) {
  for (std::size_t i = 0; i < kQuantityCount; ++i)
    if (kQuantityNames[i] == name) return static_cast<Quantity>(i);
  throw ConfigError("unknown quantity '" + std::string(name) + "'");
}

std::array<double, kQuantityCount> scaled_quantities(const CellMoments& m, double c0) {
  const double c2 = c0 * c0;
  const double c3 = c2 * c0;
  return {m.mean[0] / c0,      m.mean[1] / c0,      m.mean[2] / c0,      m.energy / c2,
          m.stress[0][0] / c2, m.stress[1][1] / c2, m.stress[0][1] / c2, m.stress[0][2] / c2,
          m.stress[1][2] / c2, m.heat_flux[0] / c3, m.heat_flux[1] / c3, m.heat_flux[2] / c3};
}

Simulation::Simulation(ParticleEnsemble ensemble, Grid1D grid, StepSettings settings, NoiseSampler& sampler,
                       std::uint64_t repetition, WallNoise* lower, WallNoise* upper)
    : ensemble_(std::move(ensemble)),
      grid_(grid),
      settings_(settings),
      sampler_(&sampler),
      repetition_(repetition),
      lower_(lower),
      upper_(upper),
      total_particles_(ensemble_.size()) {
  if (!(settings_.dt >= 0.0)) throw ConfigError("time step must be non-negative");
  if (settings_.transport && (lower_ == nullptr || upper_ == nullptr))
    throw ConfigError("transport with walls needs boundary noise for both walls");
  if (settings_.transport && settings_.channel.length != grid_.length)
    throw ConfigError("channel length and grid length differ");
  reassign_cells(ensemble_, grid_);
  refresh_moments();
}

void Simulation::attach_control(std::vector<Vec3> control, const CellMoments& analytic) {
  if (settings_.mode != CoefficientMode::kFrozen || settings_.transport || grid_.cells != 1)
    throw ConfigError("the control variate needs a homogeneous run with constant coefficients");
  if (control.size() != ensemble_.size()) throw ConfigError("control process must have one velocity per particle");
  ensemble_.control = std::move(control);
  analytic_ = analytic;
  refresh_moments();
}

void Simulation::refresh_moments() {
  moments_.resize(grid_.cells);
  for (std::size_t c = 0; c < grid_.cells; ++c) moments_[c] = compute_moments(ensemble_.cell_velocities(c));
  if (!analytic_) return;
  control_moments_.resize(grid_.cells);
  for (std::size_t c = 0; c < grid_.cells; ++c) {
    const auto [lo, hi] = ensemble_.cell_range(c);
    control_moments_[c] = compute_moments(std::span<const Vec3>(ensemble_.control).subspan(lo, hi - lo));
  }
}

void Simulation::step() {
  const double dt = settings_.dt;
  const std::uint64_t step_index = step_ + 1;
  for (std::size_t c = 0; c < grid_.cells && dt > 0.0; ++c) {
    auto v = ensemble_.cell_velocities(c);
    const std::size_t n = v.size();
    if (n == 0) continue;
    const CellMoments& m = moments_[c];

    FPCoefficients coeff = settings_.frozen;
    if (settings_.mode == CoefficientMode::kLocal) {
      if (n < 2 || !(m.energy > 0.0)) continue;
      const double density = settings_.gas.number_density * static_cast<double>(n) *
                             static_cast<double>(grid_.cells) / static_cast<double>(total_particles_);
      coeff = {relaxation_time(m, settings_.gas, density), m.mean, m.energy};
    }

    noise_.resize(n);
    NoiseRequest request{repetition_, step_index, c, v, &m};
    sampler_->sample(request, noise_);

    if (settings_.integrator == Integrator::kEulerMaruyama) {
      for (std::size_t i = 0; i < n; ++i) v[i] = em_update(v[i], coeff, dt, noise_[i]);
    } else {
      ou_update_block(v, coeff.mean, ou_factors(coeff, dt), noise_);
    }
    if (analytic_) {
      const auto [lo, hi] = ensemble_.cell_range(c);
      auto ctl = std::span<Vec3>(ensemble_.control).subspan(lo, hi - lo);
      if (settings_.integrator == Integrator::kEulerMaruyama) {
        for (std::size_t i = 0; i < n; ++i) ctl[i] = em_update(ctl[i], coeff, dt, noise_[i]);
      } else {
        ou_update_block(ctl, coeff.mean, ou_factors(coeff, dt), noise_);
      }
    }
  }

  if (settings_.transport && dt > 0.0) {
    for (std::size_t i = 0; i < ensemble_.size(); ++i)
      transport(ensemble_.position[i], ensemble_.velocity[i], dt, settings_.channel, *lower_, *upper_, settings_.gas);
    reassign_cells(ensemble_, grid_);
  }
  refresh_moments();
  ++step_;
}

std::vector<CellMoments> Simulation::estimates() const {
  if (!analytic_) return moments_;
  std::vector<CellMoments> out(moments_.size());
  for (std::size_t c = 0; c < moments_.size(); ++c)
    out[c] = control_variate_estimate(moments_[c], control_moments_[c], *analytic_);
  return out;
}

}  // namespace fpqmc
