#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpqmc/errors.hpp"
#include "fpqmc/scenarios.hpp"
#include "fpqmc/study.hpp"

namespace fs = std::filesystem;

namespace fpqmc::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

// Flags shared by run and reference that change the simulated physics.
struct Overrides {
  std::optional<std::size_t> steps;
  std::optional<double> dt;
  std::optional<std::size_t> cells;
  std::optional<double> upper_velocity;
  std::optional<double> upper_temperature;
  std::string integrator = "exact";
  std::uint64_t sobol_start = 1;

  void add_to(CLI::App& app) {
    app.add_option("--steps", steps, "Number of time steps");
    app.add_option("--dt", dt, "Time step in seconds");
    app.add_option("--cells", cells, "Number of spatial cells");
    app.add_option("--upper-velocity", upper_velocity, "Upper plate velocity along y (m/s)");
    app.add_option("--upper-temperature", upper_temperature, "Upper plate temperature (K)");
    app.add_option("--integrator", integrator, "Velocity update: exact or euler-maruyama")
        ->check(CLI::IsMember({"exact", "euler-maruyama"}));
    app.add_option("--sobol-start", sobol_start, "First Sobol' index of each block");
  }

  void apply(ScenarioConfig& c) const {
    if (steps) c.steps = *steps;
    if (dt) c.dt = *dt;
    if (cells) c.cells = *cells;
    if (upper_velocity) c.upper_wall_velocity = *upper_velocity;
    if (upper_temperature) c.upper_wall_temperature = *upper_temperature;
    c.integrator = integrator == "exact" ? Integrator::kExact : Integrator::kEulerMaruyama;
    c.sobol_start = sobol_start;
  }

  // Flags that reproduce this configuration.
  std::string text(const ScenarioConfig& c) const {
    std::ostringstream s;
    s << " --steps " << c.steps << " --dt " << c.dt << " --cells " << c.cells;
    if (!is_homogeneous(c.id))
      s << " --upper-velocity " << c.upper_wall_velocity << " --upper-temperature " << c.upper_wall_temperature;
    s << " --integrator " << integrator << " --sobol-start " << c.sobol_start;
    return s.str();
  }
};

struct RunFlags {
  std::string scenario = "relax-const";
  std::string strategy = "all";
  std::string particles;
  std::optional<std::size_t> reps;
  std::uint64_t seed = 1;
  std::string out;
  std::string reference;
  unsigned workers = 0;
  std::string fit_window = "full";
  std::string rate = "ou";
  bool no_trajectories = false;
  Overrides physics;
};

struct ReferenceFlags {
  std::string scenario = "couette";
  std::size_t n_ref = 100000;
  std::size_t r_ref = 20;
  std::uint64_t seed = 12345;
  std::string out;
  unsigned workers = 0;
  Overrides physics;
};

struct TableFlags {
  std::vector<std::string> inputs;
  std::string scenario;
  std::string out;
  std::string quantities;
  std::string fit_window = "full";
};

fs::path default_out_dir() {
  const char* env = std::getenv("FPQMC_OUT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

fs::path out_dir(const std::string& flag) { return flag.empty() ? default_out_dir() : fs::path(flag); }

fs::path default_reference_path(const fs::path& dir, ScenarioId id) {
  return dir / ("reference_" + std::string(scenario_name(id)) + ".csv");
}

std::string default_particles(ScenarioId id) {
  switch (id) {
    case ScenarioId::kUniformDemo: return "64..65536";
    case ScenarioId::kRelaxConst: return "64..16384";
    case ScenarioId::kRelaxMckean: return "64..2048";
    case ScenarioId::kCouette: return "64..4096";
    case ScenarioId::kHeatFlux: return "128..8192";
  }
  return "64..1024";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Strategy> parse_strategies(const std::string& text, ScenarioId id) {
  if (text == "all") {
    std::vector<Strategy> out;
    for (Strategy s : all_strategies())
      if (s != Strategy::kControlVariate || id == ScenarioId::kRelaxConst) out.push_back(s);
    return out;
  }
  std::vector<Strategy> out;
  for (const auto& name : split(text, ',')) out.push_back(parse_strategy(name));
  if (out.empty()) throw ConfigError("empty strategy list");
  return out;
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string join(const std::vector<Strategy>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::string(strategy_name(xs[i]));
  return s;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

std::vector<std::string> panel_quantities(ScenarioId id) {
  if (id == ScenarioId::kUniformDemo) return {"moment_1", "moment_2", "moment_3", "moment_4"};
  return {"mean_y", "energy", "sigma_xy", "sigma_yz"};
}

ReferenceSolution load_run_reference(const RunFlags& f, const ScenarioConfig& c, const fs::path& dir) {
  if (is_homogeneous(c.id)) {
    const RateConvention rate = f.rate == "tau" ? RateConvention::kPlainTau : RateConvention::kOuRecursion;
    return c.id == ScenarioId::kRelaxConst ? reference_relax_const(c, rate) : reference_relax_mckean(c, rate);
  }
  const fs::path path = f.reference.empty() ? default_reference_path(dir, c.id) : fs::path(f.reference);
  const std::string rebuild = "fpqmc reference --scenario " + std::string(scenario_name(c.id)) +
                              f.physics.text(c) + " --out " + path.string();
  if (!fs::exists(path))
    throw ConfigError("no reference solution at " + path.string() + "\nbuild it first with:\n  " + rebuild);
  ReferenceSolution ref = load_reference(path);
  if (ref.config_hash != reference_hash(c, ref.n_ref, ref.r_ref, ref.seed))
    throw StaleReferenceError("reference " + path.string() +
                              " was built for a different configuration\nrebuild it with:\n  " + rebuild);
  return ref;
}

int cmd_run(const RunFlags& f, std::ostream& out) {
  ScenarioConfig c = default_config(parse_scenario(f.scenario));
  f.physics.apply(c);
  c.seed = f.seed;
  if (f.reps) c.repetitions = *f.reps;
  const auto particles = parse_particle_list(f.particles.empty() ? default_particles(c.id) : f.particles);
  const FitWindow window = parse_fit_window(f.fit_window);
  const fs::path dir = out_dir(f.out);
  const std::string name(scenario_name(c.id));

  std::vector<std::string> header = {std::string("fpqmc ") + kVersion + " run"};
  std::vector<ConvergenceRecord> records;
  std::vector<Strategy> strategies;
  if (c.id == ScenarioId::kUniformDemo) {
    c.particles = particles.front();
    c.validate();
    header.push_back("command: fpqmc run --scenario uniform-demo --particles " + join(particles) +
                     " --reps " + std::to_string(c.repetitions) + " --seed " + std::to_string(c.seed) +
                     " --fit-window " + f.fit_window);
    header.push_back("series: mc (pseudo-random), rqmc (nested-scrambled Sobol'), rqmc-shift (digitally shifted "
                     "Sobol'); relative RMSE of E[U^k] = 1/(k+1)");
    records = run_uniform_demo(particles, c.repetitions, c.seed, window, f.workers);
  } else {
    strategies = parse_strategies(f.strategy, c.id);
    for (Strategy s : strategies) {
      ScenarioConfig probe = c;
      probe.strategy = s;
      probe.particles = particles.front();
      probe.validate();
    }
    const ReferenceSolution ref = load_run_reference(f, c, dir);
    if (ref.steps != c.steps || ref.cells != c.cells)
      throw ConfigError("reference grid does not match the run configuration");
    header.push_back("command: fpqmc run --scenario " + name + " --strategy " + join(strategies) + " --particles " +
                     join(particles) + " --reps " + std::to_string(c.repetitions) + " --seed " +
                     std::to_string(c.seed) + f.physics.text(c) + " --fit-window " + f.fit_window +
                     (is_homogeneous(c.id) ? " --rate " + f.rate : ""));
    header.push_back("config: " + c.canonical());
    header.push_back("reference: provenance=" + ref.provenance +
                     (ref.provenance == "simulation"
                          ? " config_hash=" + ref.config_hash + " n_ref=" + std::to_string(ref.n_ref) +
                                " r_ref=" + std::to_string(ref.r_ref) + " seed=" + std::to_string(ref.seed)
                          : ""));
    header.push_back("units: velocity / c0, energy and stress / c0^2, heat flux / c0^3, c0 = sqrt(k T0 / m)");

    StudyOptions o;
    o.base = c;
    o.strategies = strategies;
    o.particles = particles;
    o.workers = f.workers;
    o.window = window;
    if (!f.no_trajectories)
      o.on_runs = [&](Strategy s, std::size_t n, const std::vector<MomentSeries>& runs) {
        auto file = open_output(dir / (name + "_" + std::string(strategy_name(s)) + "_N" + std::to_string(n) +
                                       "_trajectories.csv"));
        auto h = header;
        h.push_back("strategy=" + std::string(strategy_name(s)) + " N=" + std::to_string(n));
        write_header(file, h);
        write_trajectories_csv(file, runs);
      };
    records = convergence_study(o, ref);
  }

  const fs::path conv_path = dir / (name + "_convergence.csv"), slope_path = dir / (name + "_slopes.csv");
  {
    auto file = open_output(conv_path);
    write_header(file, header);
    write_convergence_csv(file, records);
  }
  {
    auto file = open_output(slope_path);
    write_header(file, header);
    write_slopes_csv(file, records, window);
  }
  out << "convergence rates (" << name << ", fit window " << fit_window_name(window) << ")\n"
      << format_slope_table(records, panel_quantities(c.id)) << "wrote " << conv_path.string() << "\nwrote "
      << slope_path.string() << '\n';
  return 0;
}

int cmd_reference(const ReferenceFlags& f, std::ostream& out) {
  ScenarioConfig c = default_config(parse_scenario(f.scenario));
  if (is_homogeneous(c.id) || c.id == ScenarioId::kUniformDemo)
    throw ConfigError("reference solutions are simulated for couette and heatflux only; " + f.scenario +
                      " uses its analytic reference");
  f.physics.apply(c);
  c.particles = f.n_ref;
  c.repetitions = f.r_ref;
  c.validate();
  const fs::path path = f.out.empty() ? default_reference_path(default_out_dir(), c.id) : fs::path(f.out);
  const ReferenceSolution ref = build_reference_inhomogeneous(c, f.n_ref, f.r_ref, f.seed, f.workers);
  save_reference(path, ref);
  out << "reference " << path.string() << " (config hash " << ref.config_hash << ", N_ref " << f.n_ref
      << ", R_ref " << f.r_ref << ", seed " << f.seed << ")\nnoise floor (mean standard error, scaled units):\n";
  char buf[96];
  for (std::size_t q = 0; q < kQuantityCount; ++q) {
    std::snprintf(buf, sizeof buf, "  %-10s %.3e\n", std::string(quantity_name(q)).c_str(), ref.noise_floor(q));
    out << buf;
  }
  return 0;
}

int cmd_table(const TableFlags& f, std::ostream& out) {
  std::vector<fs::path> paths;
  for (const auto& p : f.inputs) paths.emplace_back(p);
  if (paths.empty()) {
    if (f.scenario.empty()) throw ConfigError("table needs --in <convergence.csv> or --scenario");
    paths.push_back(out_dir(f.out) / (std::string(scenario_name(parse_scenario(f.scenario))) + "_convergence.csv"));
  }
  std::vector<std::string> missing;
  for (const auto& p : paths)
    if (!fs::exists(p)) missing.push_back(p.string());
  if (!missing.empty()) {
    std::string msg = "missing convergence CSV; expected:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw IoError(msg);
  }
  const FitWindow window = parse_fit_window(f.fit_window);
  std::vector<ConvergenceRecord> records;
  for (const auto& p : paths) {
    std::ifstream in(p);
    for (auto& r : read_convergence_csv(in)) {
      r.finalize(window);
      records.push_back(std::move(r));
    }
  }
  std::vector<std::string> quantities = split(f.quantities, ',');
  if (quantities.empty()) {
    const bool demo = !records.empty() && records.front().quantity.rfind("moment_", 0) == 0;
    quantities = panel_quantities(demo ? ScenarioId::kUniformDemo : ScenarioId::kRelaxConst);
  }
  out << format_slope_table(records, quantities);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fokker-Planck particle simulations with pseudo- and quasi-random noise", "fpqmc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI file; [run], [reference] and [table] sections hold option values");

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Convergence study of one scenario over strategies and N");
  run_cmd->add_option("--scenario", rf.scenario, "uniform-demo, relax-const, relax-mckean, couette or heatflux")
      ->check(CLI::IsMember({"uniform-demo", "relax-const", "relax-mckean", "couette", "heatflux"}));
  run_cmd->add_option("--strategy", rf.strategy, "Comma-separated strategy names or 'all'")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
  run_cmd->add_option("--particles", rf.particles, "N list: a..b (powers of two) or a,b,c")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
  run_cmd->add_option("--reps", rf.reps, "Independent repetitions per (strategy, N)");
  run_cmd->add_option("--seed", rf.seed, "Run seed");
  run_cmd->add_option("--out", rf.out, "Output directory (default $FPQMC_OUT or .)");
  run_cmd->add_option("--reference", rf.reference, "Reference file (default <out>/reference_<scenario>.csv)");
  run_cmd->add_option("--workers", rf.workers, "Worker threads (0 = all cores); never changes results");
  run_cmd->add_option("--fit-window", rf.fit_window, "Slope fit window: full or upper-half")
      ->check(CLI::IsMember({"full", "upper-half"}));
  run_cmd->add_option("--rate", rf.rate, "Homogeneous reference decay: ou or tau")
      ->check(CLI::IsMember({"ou", "tau"}));
  run_cmd->add_flag("--no-trajectories", rf.no_trajectories, "Skip the per-(strategy, N) trajectory CSVs");
  rf.physics.add_to(*run_cmd);

  ReferenceFlags ef;
  auto* ref_cmd = app.add_subcommand("reference", "Build and cache a pseudo-random reference solution");
  ref_cmd->add_option("--scenario", ef.scenario, "couette or heatflux")
      ->check(CLI::IsMember({"couette", "heatflux"}));
  ref_cmd->add_option("--n-ref", ef.n_ref, "Particles per reference repetition");
  ref_cmd->add_option("--r-ref", ef.r_ref, "Reference repetitions");
  ref_cmd->add_option("--seed", ef.seed, "Reference seed");
  ref_cmd->add_option("--out", ef.out, "Reference file (default $FPQMC_OUT/reference_<scenario>.csv)");
  ref_cmd->add_option("--workers", ef.workers, "Worker threads (0 = all cores)");
  ef.physics.add_to(*ref_cmd);

  TableFlags tf;
  auto* table_cmd = app.add_subcommand("table", "Slope table from convergence CSVs");
  table_cmd->add_option("--in", tf.inputs, "Convergence CSV files");
  table_cmd->add_option("--scenario", tf.scenario, "Read <out>/<scenario>_convergence.csv");
  table_cmd->add_option("--out", tf.out, "Directory holding the CSVs (default $FPQMC_OUT or .)");
  table_cmd->add_option("--quantities", tf.quantities, "Comma-separated columns")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
  table_cmd->add_option("--fit-window", tf.fit_window, "full or upper-half")
      ->check(CLI::IsMember({"full", "upper-half"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(rf, out);
    if (*ref_cmd) return cmd_reference(ef, out);
    return cmd_table(tf, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const StaleReferenceError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fpqmc::cli
