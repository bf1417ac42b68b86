#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fpqmc {

/// Per-field (step, cell) error decomposition over repetitions.
struct ErrorField {
  std::vector<double> mean;
  std::vector<double> bias;      // |mean - reference|
  std::vector<double> variance;  // population variance (divide by R)
  std::vector<double> rmse;      // sqrt(bias^2 + variance)
};

/// runs[r][f] is the value of field f in repetition r; all runs and the
/// reference have the same length.
ErrorField rmse_field(std::span<const std::vector<double>> runs, std::span<const double> reference);

/// Arithmetic mean of the field.
double averaged_rmse(std::span<const double> rmse);

/// Averaged RMSE below which an error series counts as identically zero.
inline constexpr double kExactThreshold = 1e-12;

struct SlopeFit {
  double slope = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // non-positive or non-finite errors
};

/// Least-squares slope of log2(error) against log2(N). Points with a
/// non-positive error are excluded; fewer than three usable points throw
/// ConfigError.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

enum class FitWindow { kFull, kUpperHalf };
FitWindow parse_fit_window(const std::string& name);
std::string fit_window_name(FitWindow w);

/// Error of one quantity under one strategy as a function of N.
struct ConvergenceRecord {
  std::string strategy;
  std::string quantity;
  std::vector<std::pair<std::size_t, double>> points;  // (N, averaged RMSE), sorted by N
  double slope = 0.0;
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  bool exact = false;  // every averaged RMSE below kExactThreshold
  bool fitted = false;

  /// Sorts the points and fills slope, window and the exact marker.
  void finalize(FitWindow window);
};

}  // namespace fpqmc
