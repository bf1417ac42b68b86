#include "fpqmc/scenarios.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "fpqmc/errors.hpp"
#include "fpqmc/parallel.hpp"
#include "json.hpp"

namespace fpqmc {
namespace {

constexpr std::array<std::string_view, 5> kScenarioNames = {"uniform-demo", "relax-const", "relax-mckean", "couette",
                                                             "heatflux"};

// Seed of the large sample that fixes the cut distribution's initial moments.
constexpr std::uint64_t kMeasureSeed = 0x6d636b65616eULL;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ReferenceSolution blank_reference(const ScenarioConfig& c, std::string provenance) {
  ReferenceSolution r;
  r.steps = c.steps;
  r.cells = c.cells;
  r.values.assign(c.steps * c.cells * kQuantityCount, 0.0);
  r.standard_error.assign(r.values.size(), 0.0);
  r.provenance = std::move(provenance);
  return r;
}

std::size_t index_of(std::size_t step, std::size_t cell, std::size_t cells, std::size_t q) {
  return ((step - 1) * cells + cell) * kQuantityCount + q;
}

std::vector<double> quantity_field(const std::vector<double>& values, std::size_t steps, std::size_t cells,
                                   std::size_t q) {
  std::vector<double> out(steps * cells);
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = values[f * kQuantityCount + q];
  return out;
}

}  // namespace

std::string_view scenario_name(ScenarioId id) { return kScenarioNames[static_cast<std::size_t>(id)]; }

ScenarioId parse_scenario(std::string_view name) {
  for (std::size_t i = 0; i < kScenarioNames.size(); ++i)
    if (kScenarioNames[i] == name) return static_cast<ScenarioId>(i);
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected uniform-demo, relax-const, relax-mckean, couette, heatflux)");
}

bool is_homogeneous(ScenarioId id) { return id == ScenarioId::kRelaxConst || id == ScenarioId::kRelaxMckean; }

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig c;
  c.id = id;
  switch (id) {
    case ScenarioId::kUniformDemo:
      c.steps = 0;
      c.repetitions = 200;
      break;
    case ScenarioId::kRelaxConst:
      c.steps = 35;
      c.repetitions = 1000;
      break;
    case ScenarioId::kRelaxMckean:
      c.steps = 100;
      c.repetitions = 1000;
      break;
    case ScenarioId::kCouette:
      c.steps = 300;
      c.cells = 10;
      c.upper_wall_velocity = 100.0;
      c.repetitions = 1000;
      break;
    case ScenarioId::kHeatFlux:
      c.steps = 150;
      c.cells = 20;
      c.dt = 2e-4;
      c.upper_wall_temperature = 400.0;
      c.repetitions = 1000;
      break;
  }
  return c;
}

void ScenarioConfig::validate() const {
  if (id == ScenarioId::kUniformDemo) {
    if (particles < 1 || repetitions < 1) throw ConfigError("uniform demo needs positive N and repetitions");
    return;
  }
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (steps < 1 || cells < 1 || particles < 1 || repetitions < 1)
    throw ConfigError("steps, cells, particles and repetitions must be positive");
  if (is_homogeneous(id) && cells != 1) throw ConfigError("homogeneous scenarios use exactly one cell");
  if (strategy == Strategy::kControlVariate && id != ScenarioId::kRelaxConst)
    throw ConfigError("control-variate is only defined for relax-const");
  if (id == ScenarioId::kRelaxMckean && particles < 2) throw ConfigError("relax-mckean needs at least two particles");
  if (!(initial_temperature > 0.0) || !(reservoir_temperature > 0.0) || !(lower_wall_temperature > 0.0) ||
      !(upper_wall_temperature > 0.0))
    throw ConfigError("temperatures must be positive");
  if (!(knudsen > 0.0)) throw ConfigError("Knudsen number must be positive");
}

std::string ScenarioConfig::canonical() const {
  std::ostringstream s;
  s << "scenario=" << scenario_name(id) << ";mass=" << format_double(gas.mass)
    << ";boltzmann=" << format_double(gas.boltzmann) << ";viscosity_ref=" << format_double(gas.viscosity_ref)
    << ";temperature_ref=" << format_double(gas.temperature_ref)
    << ";viscosity_exponent=" << format_double(gas.viscosity_exponent)
    << ";diameter_ref=" << format_double(gas.diameter_ref) << ";number_density=" << format_double(gas.number_density)
    << ";initial_temperature=" << format_double(initial_temperature)
    << ";reservoir_temperature=" << format_double(reservoir_temperature)
    << ";lower_wall_temperature=" << format_double(lower_wall_temperature)
    << ";upper_wall_temperature=" << format_double(upper_wall_temperature)
    << ";upper_wall_velocity=" << format_double(upper_wall_velocity) << ";knudsen=" << format_double(knudsen)
    << ";cut_angle=" << format_double(cut_angle) << ";dt=" << format_double(dt) << ";steps=" << steps
    << ";cells=" << cells << ";particles=" << particles << ";repetitions=" << repetitions
    << ";strategy=" << strategy_name(strategy)
    << ";integrator=" << (integrator == Integrator::kExact ? "exact" : "euler-maruyama") << ";seed=" << seed
    << ";sobol_start=" << sobol_start;
  return s.str();
}

std::vector<double> MomentSeries::quantity(std::size_t q) const { return quantity_field(values, steps, cells, q); }
std::vector<double> ReferenceSolution::quantity(std::size_t q) const {
  return quantity_field(values, steps, cells, q);
}

double ReferenceSolution::noise_floor(std::size_t q) const {
  if (standard_error.empty()) return 0.0;
  return averaged_rmse(quantity_field(standard_error, steps, cells, q));
}

ParticleEnsemble initial_ensemble(const ScenarioConfig& c, std::uint64_t rep) {
  const SamplerOptions opts{c.seed, PairingMode::kConsecutive, c.sobol_start};
  const Grid1D grid{c.cells, c.length()};
  const auto counts = uniform_cell_counts(c.particles, c.cells);
  const double c0 = c.velocity_scale();
  std::vector<Vec3> positions, velocities;
  positions.reserve(c.particles);
  velocities.reserve(c.particles);

  for (std::size_t j = 0; j < c.cells; ++j) {
    const std::size_t n = counts[j];
    auto source = make_init_source(c.strategy, opts, rep, j);
    std::vector<Vec3> v;
    if (c.id == ScenarioId::kRelaxMckean) {
      v = initialize_anisotropic_cut(n, c.cut_angle, *source);
      for (Vec3& x : v) x = c0 * x;
    } else if (c.id == ScenarioId::kRelaxConst && c.strategy == Strategy::kPseudoAntithetic) {
      // Antithetic trajectories: particle i + n/2 mirrors particle i.
      const std::size_t half = n / 2;
      v = initialize_maxwellian(half, c.initial_temperature, {}, c.gas, *source);
      for (std::size_t i = 0; i < half; ++i) v.push_back(-v[i]);
      if (n % 2 == 1) v.push_back(initialize_maxwellian(1, c.initial_temperature, {}, c.gas, *source)[0]);
    } else {
      v = initialize_maxwellian(n, c.initial_temperature, {}, c.gas, *source);
      if (c.id == ScenarioId::kRelaxConst) center(v);
    }

    if (is_homogeneous(c.id)) {
      for (std::size_t i = 0; i < n; ++i) positions.push_back({0.5 * grid.length, 0.0, 0.0});
    } else {
      auto pos_source = make_init_source(c.strategy, opts, rep, j, true);
      std::array<double, 3> u;
      for (std::size_t i = 0; i < n; ++i) {
        pos_source->next(u);
        const double x = std::min((static_cast<double>(j) + u[0]) * grid.width(), grid.length);
        positions.push_back({x, 0.0, 0.0});
      }
    }
    velocities.insert(velocities.end(), v.begin(), v.end());
  }
  return ParticleEnsemble(std::move(positions), std::move(velocities));
}

MomentSeries run_repetition(const ScenarioConfig& c, std::uint64_t rep) {
  c.validate();
  if (c.id == ScenarioId::kUniformDemo) throw ConfigError("uniform-demo has no particle dynamics; use run_uniform_demo");
  const SamplerOptions opts{c.seed, is_homogeneous(c.id) ? PairingMode::kHalves : PairingMode::kConsecutive,
                            c.sobol_start};
  auto sampler = make_sampler(c.strategy, opts);

  StepSettings s;
  s.dt = c.dt;
  s.gas = c.gas;
  s.integrator = c.integrator;
  std::unique_ptr<WallNoise> lower, upper;
  if (c.id == ScenarioId::kRelaxConst) {
    s.mode = CoefficientMode::kFrozen;
    s.frozen = {relaxation_time_at_temperature(c.reservoir_temperature, c.gas), {},
                c.gas.energy(c.reservoir_temperature)};
  } else {
    s.mode = CoefficientMode::kLocal;
  }
  if (!is_homogeneous(c.id)) {
    s.transport = true;
    s.channel.length = c.length();
    s.channel.lower = {c.lower_wall_temperature, {}};
    s.channel.upper = {c.upper_wall_temperature, {0.0, c.upper_wall_velocity, 0.0}};
    lower = make_wall_noise(c.strategy, opts, rep, WallSide::kLower);
    upper = make_wall_noise(c.strategy, opts, rep, WallSide::kUpper);
  }

  Simulation sim(initial_ensemble(c, rep), Grid1D{c.cells, c.length()}, s, *sampler, rep, lower.get(), upper.get());
  if (c.strategy == Strategy::kControlVariate) {
    const double scale = std::sqrt(c.reservoir_temperature / c.initial_temperature);
    std::vector<Vec3> control = sim.ensemble().velocity;
    for (Vec3& v : control) v = scale * v;
    CellMoments analytic;
    analytic.energy = s.frozen.energy;
    sim.attach_control(std::move(control), analytic);
  }

  MomentSeries out;
  out.steps = c.steps;
  out.cells = c.cells;
  out.values.resize(c.steps * c.cells * kQuantityCount);
  const double c0 = c.velocity_scale();
  for (std::size_t t = 1; t <= c.steps; ++t) {
    sim.step();
    const auto est = sim.estimates();
    for (std::size_t j = 0; j < c.cells; ++j) {
      const auto q = scaled_quantities(est[j], c0);
      std::copy(q.begin(), q.end(), out.values.begin() + static_cast<std::ptrdiff_t>(index_of(t, j, c.cells, 0)));
    }
  }
  return out;
}

std::vector<MomentSeries> run_scenario(const ScenarioConfig& c, unsigned workers) {
  c.validate();
  std::vector<MomentSeries> runs(c.repetitions);
  parallel_for(c.repetitions, workers, [&](std::size_t r) { runs[r] = run_repetition(c, r); });
  return runs;
}

ReferenceSolution reference_relax_const(const ScenarioConfig& c, RateConvention rate) {
  ReferenceSolution r = blank_reference(c, "analytic");
  const double tau = relaxation_time_at_temperature(c.reservoir_temperature, c.gas);
  const double c2 = c.velocity_scale() * c.velocity_scale();
  const double e0 = c.gas.energy(c.initial_temperature) / c2;
  const double einf = c.gas.energy(c.reservoir_temperature) / c2;
  const double k = rate == RateConvention::kOuRecursion ? 2.0 : 1.0;
  for (std::size_t t = 1; t <= c.steps; ++t)
    r.values[index_of(t, 0, 1, static_cast<std::size_t>(Quantity::kEnergy))] =
        einf + (e0 - einf) * std::exp(-k * static_cast<double>(t) * c.dt / tau);
  return r;
}

CellMoments mckean_initial_moments(double angle_deg, std::size_t samples) {
  static std::mutex mutex;
  static std::map<std::pair<double, std::size_t>, CellMoments> memo;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(angle_deg, samples);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  PseudoPointSource source(PseudoStream(kMeasureSeed, stream_id(0, 0, 0, Purpose::kInitVelocity)));
  const auto v = initialize_anisotropic_cut(samples, angle_deg, source);
  const CellMoments m = compute_moments(v);
  memo.emplace(key, m);
  return m;
}

ReferenceSolution reference_relax_mckean(const ScenarioConfig& c, RateConvention rate) {
  ReferenceSolution r = blank_reference(c, "analytic");
  const CellMoments m0 = mckean_initial_moments(c.cut_angle);
  const double tau = relaxation_time_at_temperature(c.initial_temperature, c.gas);
  const bool ou = rate == RateConvention::kOuRecursion;
  for (std::size_t t = 1; t <= c.steps; ++t) {
    const double x = static_cast<double>(t) * c.dt / tau;
    const double ds = std::exp(-(ou ? 2.0 : 1.0) * x);
    const double dq = std::exp(-(ou ? 3.0 : 1.0) * x);
    CellMoments m;
    m.energy = 1.5;
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) m.stress[k][l] = m0.stress[k][l] * ds;
      m.heat_flux[k] = m0.heat_flux[k] * dq;
    }
    const auto q = scaled_quantities(m, 1.0);
    std::copy(q.begin(), q.end(), r.values.begin() + static_cast<std::ptrdiff_t>(index_of(t, 0, 1, 0)));
  }
  return r;
}

ReferenceSolution analytic_reference(const ScenarioConfig& c) {
  if (c.id == ScenarioId::kRelaxConst) return reference_relax_const(c);
  if (c.id == ScenarioId::kRelaxMckean) return reference_relax_mckean(c);
  throw ConfigError("scenario " + std::string(scenario_name(c.id)) + " has no analytic reference");
}

std::string reference_hash(const ScenarioConfig& config, std::size_t n_ref, std::size_t r_ref, std::uint64_t seed) {
  ScenarioConfig c = config;
  c.strategy = Strategy::kPseudo;
  c.particles = n_ref;
  c.repetitions = r_ref;
  c.seed = seed;
  c.sobol_start = 1;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.canonical())));
  return buf;
}

ReferenceSolution build_reference_inhomogeneous(const ScenarioConfig& config, std::size_t n_ref, std::size_t r_ref,
                                                std::uint64_t seed, unsigned workers) {
  if (is_homogeneous(config.id) || config.id == ScenarioId::kUniformDemo)
    throw ConfigError("simulated references are built for couette and heatflux only");
  if (r_ref < 2) throw ConfigError("a simulated reference needs at least two repetitions");
  ScenarioConfig c = config;
  c.strategy = Strategy::kPseudo;
  c.particles = n_ref;
  c.repetitions = r_ref;
  c.seed = seed;
  c.sobol_start = 1;
  const auto runs = run_scenario(c, workers);

  ReferenceSolution r = blank_reference(c, "simulation");
  const double inv = 1.0 / static_cast<double>(r_ref);
  for (const auto& run : runs)
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += run.values[i] * inv;
  for (const auto& run : runs)
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const double d = run.values[i] - r.values[i];
      r.standard_error[i] += d * d;
    }
  for (double& s : r.standard_error) s = std::sqrt(s / static_cast<double>(r_ref - 1) * inv);
  r.config_hash = reference_hash(config, n_ref, r_ref, seed);
  r.n_ref = n_ref;
  r.r_ref = r_ref;
  r.seed = seed;
  return r;
}

void save_reference(const std::filesystem::path& path, const ReferenceSolution& ref) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write reference " + path.string());
  const nlohmann::json meta = {{"format", "fpqmc-reference-1"}, {"provenance", ref.provenance},
                               {"config_hash", ref.config_hash}, {"n_ref", ref.n_ref},
                               {"r_ref", ref.r_ref},             {"seed", ref.seed},
                               {"steps", ref.steps},             {"cells", ref.cells}};
  out << "# " << meta.dump() << '\n' << "step,cell,quantity,value,stderr\n";
  for (std::size_t t = 1; t <= ref.steps; ++t)
    for (std::size_t j = 0; j < ref.cells; ++j)
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        const std::size_t i = index_of(t, j, ref.cells, q);
        out << t << ',' << j << ',' << quantity_name(q) << ',' << format_double(ref.values[i]) << ','
            << format_double(ref.standard_error.empty() ? 0.0 : ref.standard_error[i]) << '\n';
      }
  if (!out) throw IoError("failed writing reference " + path.string());
}

ReferenceSolution load_reference(const std::filesystem::path& path, const std::string& expected_hash) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reference " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) throw IoError("reference " + path.string() + " lacks a metadata header");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad reference metadata in " + path.string() + ": " + e.what());
  }
  ReferenceSolution r;
  r.provenance = meta.value("provenance", "");
  r.config_hash = meta.value("config_hash", "");
  r.n_ref = meta.value("n_ref", std::size_t{0});
  r.r_ref = meta.value("r_ref", std::size_t{0});
  r.seed = meta.value("seed", std::uint64_t{0});
  r.steps = meta.value("steps", std::size_t{0});
  r.cells = meta.value("cells", std::size_t{0});
  if (!expected_hash.empty() && r.config_hash != expected_hash)
    throw StaleReferenceError("reference " + path.string() + " was built for config hash " + r.config_hash +
                              ", expected " + expected_hash + "; rebuild it with the reference command");
  r.values.assign(r.steps * r.cells * kQuantityCount, 0.0);
  r.standard_error.assign(r.values.size(), 0.0);
  std::getline(in, line);  // column header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string step, cell, quantity, value, err;
    if (!std::getline(row, step, ',') || !std::getline(row, cell, ',') || !std::getline(row, quantity, ',') ||
        !std::getline(row, value, ',') || !std::getline(row, err))
      throw IoError("malformed reference row: " + line);
    const std::size_t t = std::stoul(step), j = std::stoul(cell);
    if (t < 1 || t > r.steps || j >= r.cells) throw IoError("reference row out of range: " + line);
    const std::size_t i = index_of(t, j, r.cells, static_cast<std::size_t>(parse_quantity(quantity)));
    r.values[i] = std::stod(value);
    r.standard_error[i] = std::stod(err);
    ++rows;
  }
  if (rows != r.values.size()) throw IoError("reference " + path.string() + " is incomplete");
  return r;
}

ReferenceSolution cached_reference(const std::filesystem::path& path, const ScenarioConfig& config, std::size_t n_ref,
                                   std::size_t r_ref, std::uint64_t seed, unsigned workers) {
  const std::string hash = reference_hash(config, n_ref, r_ref, seed);
  if (std::filesystem::exists(path)) {
    try {
      return load_reference(path, hash);
    } catch (const StaleReferenceError&) {
    } catch (const IoError&) {
    }
  }
  ReferenceSolution r = build_reference_inhomogeneous(config, n_ref, r_ref, seed, workers);
  save_reference(path, r);
  return r;
}

std::vector<ConvergenceRecord> run_uniform_demo(const std::vector<std::size_t>& particles, std::size_t repetitions,
                                                std::uint64_t seed, FitWindow window, unsigned workers) {
  if (repetitions < 1) throw ConfigError("uniform demo needs at least one repetition");
  constexpr std::array<std::string_view, 3> kSeries = {"mc", "rqmc", "rqmc-shift"};
  constexpr int kMoments = 4;
  std::vector<ConvergenceRecord> records;
  for (auto series : kSeries)
    for (int k = 1; k <= kMoments; ++k) {
      ConvergenceRecord rec;
      rec.strategy = series;
      rec.quantity = "moment_" + std::to_string(k);
      records.push_back(rec);
    }

  for (std::size_t n : particles) {
    if (n < 1) throw ConfigError("uniform demo needs N >= 1");
    // estimates[series][rep][k]
    std::vector<std::vector<std::array<double, kMoments>>> est(kSeries.size(),
                                                               std::vector<std::array<double, kMoments>>(repetitions));
    parallel_for(repetitions, workers, [&](std::size_t r) {
      std::vector<double> u(n);
      for (std::size_t s = 0; s < kSeries.size(); ++s) {
        PseudoStream stream(seed, stream_id(r, n, s, Purpose::kDemo));
        if (s == 0) {
          for (double& x : u) x = stream.uniform();
        } else if (s == 1) {
          SobolGenerator gen(1);
          const std::uint64_t key = stream.next_u64();
          std::uint32_t raw;
          for (double& x : u) {
            gen.next_raw(std::span<std::uint32_t>(&raw, 1));
            x = owen_scramble(raw, key) * kFractionScale;
          }
        } else {
          SobolGenerator gen = apply_digital_shift(SobolGenerator(1), stream);
          gen.next_block(n, u);
        }
        std::array<double, kMoments> sum{};
        for (double x : u) {
          double p = 1.0;
          for (int k = 0; k < kMoments; ++k) {
            p *= x;
            sum[k] += p;
          }
        }
        for (int k = 0; k < kMoments; ++k) est[s][r][k] = sum[k] / static_cast<double>(n);
      }
    });
    for (std::size_t s = 0; s < kSeries.size(); ++s)
      for (int k = 0; k < kMoments; ++k) {
        const double exact = 1.0 / (k + 2);
        std::vector<std::vector<double>> runs(repetitions, std::vector<double>(1));
        for (std::size_t r = 0; r < repetitions; ++r) runs[r][0] = est[s][r][k] / exact;
        const std::array<double, 1> ref{1.0};
        const auto field = rmse_field(runs, ref);
        records[s * kMoments + k].points.emplace_back(n, averaged_rmse(field.rmse));
      }
  }
  for (auto& rec : records) rec.finalize(window);
  return records;
}

}  // namespace fpqmc
