#include "fpqmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "fpqmc/errors.hpp"

namespace fpqmc {

ErrorField rmse_field(std::span<const std::vector<double>> runs, std::span<const double> reference) {
  if (runs.empty()) throw ConfigError("rmse_field needs at least one repetition");
  const std::size_t f = reference.size();
  for (const auto& run : runs)
    if (run.size() != f) throw ConfigError("rmse_field: run and reference sizes differ");
  const double inv_r = 1.0 / static_cast<double>(runs.size());

  ErrorField e;
  e.mean.assign(f, 0.0);
  e.variance.assign(f, 0.0);
  for (const auto& run : runs)
    for (std::size_t i = 0; i < f; ++i) e.mean[i] += run[i];
  for (double& m : e.mean) m *= inv_r;
  // Centered accumulation; equals (1/R) sum mu^2 - mean^2 without cancellation.
  for (const auto& run : runs)
    for (std::size_t i = 0; i < f; ++i) {
      const double d = run[i] - e.mean[i];
      e.variance[i] += d * d;
    }
  e.bias.resize(f);
  e.rmse.resize(f);
  for (std::size_t i = 0; i < f; ++i) {
    e.variance[i] *= inv_r;
    e.bias[i] = std::abs(e.mean[i] - reference[i]);
    e.rmse[i] = std::sqrt(e.bias[i] * e.bias[i] + e.variance[i]);
  }
  return e;
}

double averaged_rmse(std::span<const double> rmse) {
  if (rmse.empty()) return 0.0;
  double s = 0.0;
  for (double x : rmse) s += x;
  return s / static_cast<double>(rmse.size());
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, err] : points) {
    if (!(err > 0.0) || !std::isfinite(err) || !(n > 0.0)) {
      ++fit.excluded;
      std::cerr << "warning: fit_slope excludes point N=" << n << " with error " << err << '\n';
      continue;
    }
    const double x = std::log2(n), y = std::log2(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.used;
  }
  if (fit.used < 3) throw ConfigError("fit_slope needs at least three positive points");
  const double k = static_cast<double>(fit.used);
  const double denom = k * sxx - sx * sx;
  if (!(denom > 0.0)) throw ConfigError("fit_slope needs at least two distinct N");
  fit.slope = (k * sxy - sx * sy) / denom;
  return fit;
}

FitWindow parse_fit_window(const std::string& name) {
  if (name == "full") return FitWindow::kFull;
  if (name == "upper-half") return FitWindow::kUpperHalf;
  throw ConfigError("unknown fit window '" + name + "' (expected full or upper-half)");
}

std::string fit_window_name(FitWindow w) { return w == FitWindow::kFull ? "full" : "upper-half"; }

void ConvergenceRecord::finalize(FitWindow window) {
  std::sort(points.begin(), points.end());
  exact = !points.empty() &&
          std::all_of(points.begin(), points.end(), [](const auto& p) { return p.second < kExactThreshold; });
  std::size_t first = 0;
  if (window == FitWindow::kUpperHalf && points.size() >= 6) first = points.size() / 2;
  fitted = false;
  slope = 0.0;
  if (points.empty()) return;
  n_min = points[first].first;
  n_max = points.back().first;
  if (exact || points.size() - first < 3) return;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = first; i < points.size(); ++i)
    xy.emplace_back(static_cast<double>(points[i].first), points[i].second);
  try {
    slope = fit_slope(xy).slope;
    fitted = true;
  } catch (const ConfigError&) {
    fitted = false;  // too few positive errors
  }
}

}  // namespace fpqmc
