#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpqmc/scenarios.hpp"
#include "fpqmc/stats.hpp"

namespace fpqmc {

/// Averaged RMSE of every quantity for one (strategy, N) batch of runs.
std::array<double, kQuantityCount> averaged_rmse_by_quantity(const std::vector<MomentSeries>& runs,
                                                             const ReferenceSolution& reference);

struct StudyOptions {
  ScenarioConfig base;
  std::vector<Strategy> strategies;
  std::vector<std::size_t> particles;
  unsigned workers = 0;
  FitWindow window = FitWindow::kFull;
  /// Called after each (strategy, N) batch, e.g. to write trajectories.
  std::function<void(Strategy, std::size_t, const std::vector<MomentSeries>&)> on_runs;
};

/// One record per (strategy, quantity), points over the requested N.
std::vector<ConvergenceRecord> convergence_study(const StudyOptions& options, const ReferenceSolution& reference);

const ConvergenceRecord* find_record(const std::vector<ConvergenceRecord>& records, std::string_view strategy,
                                     std::string_view quantity);

/// "a..b" expands to the powers of two from a to b; "a,b,c" and "a" are
/// taken literally.
std::vector<std::size_t> parse_particle_list(const std::string& text);

// CSV emission. Every file starts with '# ' comment lines.
void write_header(std::ostream& out, const std::vector<std::string>& lines);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_slopes_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records, FitWindow window);
void write_trajectories_csv(std::ostream& out, const std::vector<MomentSeries>& runs);

/// Reads a convergence CSV (comment lines skipped) back into records.
std::vector<ConvergenceRecord> read_convergence_csv(std::istream& in);

/// Strategy x quantity slope matrix; "0" marks identically zero error.
std::string format_slope_table(const std::vector<ConvergenceRecord>& records,
                               const std::vector<std::string>& quantities);

}  // namespace fpqmc
