#include "fpqmc/study.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fpqmc/errors.hpp"

namespace fpqmc {

std::array<double, kQuantityCount> averaged_rmse_by_quantity(const std::vector<MomentSeries>& runs,
                                                             const ReferenceSolution& reference) {
  if (runs.empty()) throw ConfigError("no runs to evaluate");
  for (const auto& run : runs)
    if (run.steps != reference.steps || run.cells != reference.cells)
      throw ConfigError("run and reference dimensions differ (steps " + std::to_string(run.steps) + " vs " +
                        std::to_string(reference.steps) + ", cells " + std::to_string(run.cells) + " vs " +
                        std::to_string(reference.cells) + ")");
  std::array<double, kQuantityCount> out{};
  std::vector<std::vector<double>> fields(runs.size());
  for (std::size_t q = 0; q < kQuantityCount; ++q) {
    for (std::size_t r = 0; r < runs.size(); ++r) fields[r] = runs[r].quantity(q);
    const auto ref = reference.quantity(q);
    out[q] = averaged_rmse(rmse_field(fields, ref).rmse);
  }
  return out;
}

std::vector<ConvergenceRecord> convergence_study(const StudyOptions& o, const ReferenceSolution& reference) {
  std::vector<ConvergenceRecord> records;
  for (Strategy s : o.strategies) {
    std::vector<ConvergenceRecord> per_q(kQuantityCount);
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      per_q[q].strategy = strategy_name(s);
      per_q[q].quantity = quantity_name(q);
    }
    for (std::size_t n : o.particles) {
      ScenarioConfig c = o.base;
      c.strategy = s;
      c.particles = n;
      const auto runs = run_scenario(c, o.workers);
      if (o.on_runs) o.on_runs(s, n, runs);
      const auto err = averaged_rmse_by_quantity(runs, reference);
      for (std::size_t q = 0; q < kQuantityCount; ++q) per_q[q].points.emplace_back(n, err[q]);
    }
    for (auto& rec : per_q) {
      rec.finalize(o.window);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

const ConvergenceRecord* find_record(const std::vector<ConvergenceRecord>& records, std::string_view strategy,
                                     std::string_view quantity) {
  for (const auto& r : records)
    if (r.strategy == strategy && r.quantity == quantity) return &r;
  return nullptr;
}

std::vector<std::size_t> parse_particle_list(const std::string& text) {
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size() || v == 0) throw ConfigError("bad particle count '" + s + "' in '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::size_t a = number(text.substr(0, dots)), b = number(text.substr(dots + 2));
    if ((a & (a - 1)) != 0 || (b & (b - 1)) != 0 || a > b)
      throw ConfigError("particle range '" + text + "' must be powers of two a..b with a <= b");
    for (std::size_t n = a; n <= b; n *= 2) out.push_back(n);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(number(item));
  if (out.empty()) throw ConfigError("empty particle list");
  return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << '\n';
}

namespace {
std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "strategy,quantity,N,averaged_rmse\n";
  for (const auto& r : records)
    for (const auto& [n, err] : r.points) out << r.strategy << ',' << r.quantity << ',' << n << ',' << g17(err) << '\n';
}

void write_slopes_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records, FitWindow window) {
  out << "strategy,quantity,slope,n_min,n_max,fit_window,exact\n";
  for (const auto& r : records) {
    out << r.strategy << ',' << r.quantity << ',';
    if (r.fitted) out << g17(r.slope);
    else out << "nan";
    out << ',' << r.n_min << ',' << r.n_max << ',' << fit_window_name(window) << ',' << (r.exact ? 1 : 0) << '\n';
  }
}

void write_trajectories_csv(std::ostream& out, const std::vector<MomentSeries>& runs) {
  out << "step,cell,quantity,repetition,value\n";
  if (runs.empty()) return;
  const std::size_t steps = runs.front().steps, cells = runs.front().cells;
  for (std::size_t t = 1; t <= steps; ++t)
    for (std::size_t j = 0; j < cells; ++j)
      for (std::size_t q = 0; q < kQuantityCount; ++q)
        for (std::size_t r = 0; r < runs.size(); ++r)
          out << t << ',' << j << ',' << quantity_name(q) << ',' << r << ',' << g17(runs[r].at(t, j, q)) << '\n';
}

std::vector<ConvergenceRecord> read_convergence_csv(std::istream& in) {
  std::vector<ConvergenceRecord> records;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "strategy,quantity,N,averaged_rmse") throw IoError("unexpected convergence CSV header: " + line);
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string s, q, n, e;
    if (!std::getline(row, s, ',') || !std::getline(row, q, ',') || !std::getline(row, n, ',') ||
        !std::getline(row, e))
      throw IoError("malformed convergence row: " + line);
    const auto key = std::make_pair(s, q);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, records.size()).first;
      records.push_back({});
      records.back().strategy = s;
      records.back().quantity = q;
    }
    records[it->second].points.emplace_back(std::stoull(n), std::stod(e));
  }
  if (!header) throw IoError("convergence CSV has no header row");
  return records;
}

std::string format_slope_table(const std::vector<ConvergenceRecord>& records,
                               const std::vector<std::string>& quantities) {
  std::vector<std::string> strategies;
  for (const auto& r : records)
    if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end())
      strategies.push_back(r.strategy);
  std::size_t w0 = 8;
  for (const auto& s : strategies) w0 = std::max(w0, s.size());
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w0), "strategy");
  out << buf;
  for (const auto& q : quantities) {
    std::snprintf(buf, sizeof buf, "  %10s", q.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& s : strategies) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w0), s.c_str());
    out << buf;
    for (const auto& q : quantities) {
      const ConvergenceRecord* r = find_record(records, s, q);
      if (r == nullptr) std::snprintf(buf, sizeof buf, "  %10s", "-");
      else if (r->exact) std::snprintf(buf, sizeof buf, "  %10s", "0");
      else if (!r->fitted) std::snprintf(buf, sizeof buf, "  %10s", "n/a");
      else std::snprintf(buf, sizeof buf, "  %10.2f", r->slope);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace fpqmc
