#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fpqmc/gas.hpp"
#include "fpqmc/sampling.hpp"
#include "fpqmc/simulation.hpp"
#include "fpqmc/stats.hpp"

namespace fpqmc {

enum class ScenarioId { kUniformDemo, kRelaxConst, kRelaxMckean, kCouette, kHeatFlux };

std::string_view scenario_name(ScenarioId id);
ScenarioId parse_scenario(std::string_view name);
bool is_homogeneous(ScenarioId id);

struct ScenarioConfig {
  ScenarioId id = ScenarioId::kRelaxConst;
  GasModel gas;
  double initial_temperature = 300.0;    // K; also the scaling temperature
  double reservoir_temperature = 600.0;  // K; constant-coefficient relaxation
  double lower_wall_temperature = 300.0;
  double upper_wall_temperature = 300.0;
  double upper_wall_velocity = 0.0;  // m/s along y
  double knudsen = 0.17;
  double cut_angle = 25.0;  // degrees; McKean-Vlasov initial state
  double dt = 1e-4;
  std::size_t steps = 35;
  std::size_t cells = 1;
  std::size_t particles = 1024;
  std::size_t repetitions = 100;
  Strategy strategy = Strategy::kPseudo;
  Integrator integrator = Integrator::kExact;
  std::uint64_t seed = 1;
  std::uint64_t sobol_start = 1;

  double length() const { return gas.domain_length(knudsen); }
  double velocity_scale() const { return gas.thermal_speed(initial_temperature); }
  /// Throws ConfigError for invalid combinations.
  void validate() const;
  /// Canonical text of every field that influences results.
  std::string canonical() const;
};

ScenarioConfig default_config(ScenarioId id);

/// Scaled moments of one repetition after steps 1..T:
/// values[((t - 1) * cells + j) * kQuantityCount + q].
struct MomentSeries {
  std::size_t steps = 0;
  std::size_t cells = 0;
  std::vector<double> values;

  double at(std::size_t step, std::size_t cell, std::size_t q) const {
    return values[((step - 1) * cells + cell) * kQuantityCount + q];
  }
  /// Field of one quantity over (step, cell), step-major.
  std::vector<double> quantity(std::size_t q) const;
};

/// Builds the initial ensemble, walls and sampler for repetition `rep` and
/// runs all steps.
MomentSeries run_repetition(const ScenarioConfig& config, std::uint64_t repetition);

/// All repetitions, ordered by repetition index; workers = 0 uses every core.
std::vector<MomentSeries> run_scenario(const ScenarioConfig& config, unsigned workers = 0);

/// Initial particles of one repetition (exposed for tests).
ParticleEnsemble initial_ensemble(const ScenarioConfig& config, std::uint64_t repetition);

enum class RateConvention { kOuRecursion, kPlainTau };

struct ReferenceSolution {
  std::size_t steps = 0;
  std::size_t cells = 0;
  std::vector<double> values;  // same layout as MomentSeries
  std::vector<double> standard_error;  // per entry, 0 for analytic references
  std::string provenance;  // "analytic" or "simulation"
  std::string config_hash;
  std::size_t n_ref = 0;
  std::size_t r_ref = 0;
  std::uint64_t seed = 0;

  double at(std::size_t step, std::size_t cell, std::size_t q) const {
    return values[((step - 1) * cells + cell) * kQuantityCount + q];
  }
  std::vector<double> quantity(std::size_t q) const;
  /// Mean standard error of one quantity over all fields.
  double noise_floor(std::size_t q) const;
};

/// Energy tends to eps_inf as exp(-2t/tau) (kOuRecursion, implied by the
/// exact update) or exp(-t/tau) (kPlainTau); mean, stress and heat flux 0.
ReferenceSolution reference_relax_const(const ScenarioConfig& config,
                                        RateConvention rate = RateConvention::kOuRecursion);

/// Mean 0 and energy 3/2 constant, stress decaying as exp(-2t/tau) and heat
/// flux as exp(-3t/tau) (or exp(-t/tau) for both under kPlainTau), with
/// amplitudes measured on 2^22 initial samples.
ReferenceSolution reference_relax_mckean(const ScenarioConfig& config,
                                         RateConvention rate = RateConvention::kOuRecursion);

/// Scaled initial stress and heat flux of the cut distribution, measured on
/// `samples` pseudo-random draws. Memoized.
CellMoments mckean_initial_moments(double angle_deg, std::size_t samples = std::size_t{1} << 22);

/// Hash of the configuration fields that define a reference.
std::string reference_hash(const ScenarioConfig& config, std::size_t n_ref, std::size_t r_ref, std::uint64_t seed);

/// Pseudo-random run at (n_ref, r_ref) averaged over repetitions.
ReferenceSolution build_reference_inhomogeneous(const ScenarioConfig& config, std::size_t n_ref, std::size_t r_ref,
                                                std::uint64_t seed, unsigned workers = 0);

/// Analytic reference for homogeneous scenarios.
ReferenceSolution analytic_reference(const ScenarioConfig& config);

void save_reference(const std::filesystem::path& path, const ReferenceSolution& ref);
/// Throws StaleReferenceError when the stored hash differs from
/// `expected_hash` (skipped when empty), IoError when unreadable.
ReferenceSolution load_reference(const std::filesystem::path& path, const std::string& expected_hash = {});

/// Loads the reference from `path` when it matches, else builds and saves it.
ReferenceSolution cached_reference(const std::filesystem::path& path, const ScenarioConfig& config, std::size_t n_ref,
                                   std::size_t r_ref, std::uint64_t seed, unsigned workers = 0);

/// Uniform-moment demo: relative RMSE of E[U^k] = 1/(k+1), k = 1..4, under
/// plain Monte Carlo ("mc"), nested-scrambled Sobol' ("rqmc") and digitally
/// shifted Sobol' ("rqmc-shift").
std::vector<ConvergenceRecord> run_uniform_demo(const std::vector<std::size_t>& particles, std::size_t repetitions,
                                                std::uint64_t seed, FitWindow window = FitWindow::kFull,
                                                unsigned workers = 0);

}  // namespace fpqmc
