#pragma once

#include <cmath>
#include <numbers>

namespace fpqmc {

/// Monoatomic gas constants. Defaults describe argon with a power-law
/// (VHS-type) viscosity.
struct GasModel {
  double mass = 6.63e-26;            // kg
  double boltzmann = 1.380649e-23;   // J/K
  double viscosity_ref = 2.117e-5;   // Pa s at temperature_ref
  double temperature_ref = 273.0;    // K
  double viscosity_exponent = 0.81;  // omega
  double diameter_ref = 4.17e-10;    // m
  double number_density = 1e19;      // 1/m^3

  /// T = (2/3) (m/k) eps
  double temperature(double energy) const { return 2.0 / 3.0 * mass / boltzmann * energy; }
  double energy(double temperature) const { return 1.5 * boltzmann * temperature / mass; }
  /// sqrt(kT/m), the per-component standard deviation of a Maxwellian.
  double thermal_speed(double temperature) const { return std::sqrt(boltzmann * temperature / mass); }
  double viscosity(double temperature) const {
    return viscosity_ref * std::pow(temperature / temperature_ref, viscosity_exponent);
  }
  /// Hard-sphere mean free path 1 / (sqrt(2) pi d^2 n).
  double mean_free_path() const {
    return 1.0 / (std::numbers::sqrt2 * std::numbers::pi * diameter_ref * diameter_ref * number_density);
  }
  double domain_length(double knudsen) const { return mean_free_path() / knudsen; }
};

}  // namespace fpqmc
