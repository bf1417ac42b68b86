#include "fpqmc/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "fpqmc/errors.hpp"
#include "fpqmc/normal.hpp"

namespace fpqmc {

CellMoments compute_moments(std::span<const Vec3> velocities) {
  CellMoments m;
  const std::size_t n = velocities.size();
  m.count = n;
  if (n == 0) return m;
  const double inv = 1.0 / static_cast<double>(n);

  Vec3 sum{};
  for (const Vec3& v : velocities)
    for (int k = 0; k < 3; ++k) sum[k] += v[k];
  for (int k = 0; k < 3; ++k) m.mean[k] = sum[k] * inv;

  double s[3][3] = {};
  Vec3 q{};
  for (const Vec3& v : velocities) {
    const Vec3 u = v - m.mean;
    const double u2 = dot(u, u);
    for (int k = 0; k < 3; ++k) {
      for (int l = k; l < 3; ++l) s[k][l] += u[k] * u[l];
      q[k] += u[k] * u2;
    }
  }
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) s[k][l] *= inv;
  const double trace = s[0][0] + s[1][1] + s[2][2];
  m.energy = 0.5 * trace;
  for (int k = 0; k < 3; ++k) {
    for (int l = k; l < 3; ++l) {
      const double v = s[k][l] - (k == l ? trace / 3.0 : 0.0);
      m.stress[k][l] = v;
      m.stress[l][k] = v;
    }
    m.heat_flux[k] = 0.5 * q[k] * inv;
    m.stddev[k] = std::sqrt(s[k][k]);
  }
  return m;
}

ParticleEnsemble::ParticleEnsemble(std::vector<Vec3> positions, std::vector<Vec3> velocities)
    : position(std::move(positions)), velocity(std::move(velocities)) {
  if (position.size() != velocity.size()) throw ConfigError("ensemble: positions and velocities differ in length");
  cell.assign(velocity.size(), 0);
  offsets = {0, velocity.size()};
}

std::span<Vec3> ParticleEnsemble::cell_velocities(std::size_t c) {
  return std::span<Vec3>(velocity).subspan(offsets[c], offsets[c + 1] - offsets[c]);
}

std::span<const Vec3> ParticleEnsemble::cell_velocities(std::size_t c) const {
  return std::span<const Vec3>(velocity).subspan(offsets[c], offsets[c + 1] - offsets[c]);
}

void reassign_cells(ParticleEnsemble& e, const Grid1D& grid) {
  if (grid.cells == 0 || !(grid.length > 0.0)) throw ConfigError("grid needs at least one cell and positive length");
  const std::size_t n = e.size();
  const double inv_width = 1.0 / grid.width();
  const auto top = static_cast<std::uint32_t>(grid.cells - 1);

  std::vector<std::size_t> count(grid.cells + 1, 0);
  e.cell.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = e.position[i][0];
    if (!(x >= 0.0 && x <= grid.length)) throw StepError("particle left the domain: x = " + std::to_string(x));
    const auto c = std::min(static_cast<std::uint32_t>(x * inv_width), top);
    e.cell[i] = c;
    ++count[c + 1];
  }
  for (std::size_t c = 0; c < grid.cells; ++c) count[c + 1] += count[c];
  e.offsets = count;

  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i) sorted = e.cell[i - 1] <= e.cell[i];
  if (sorted) return;

  std::vector<std::size_t> next(count.begin(), count.end() - 1);
  std::vector<Vec3> pos(n), vel(n), ctl(e.control.size());
  std::vector<std::uint32_t> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t dst = next[e.cell[i]]++;
    pos[dst] = e.position[i];
    vel[dst] = e.velocity[i];
    cells[dst] = e.cell[i];
    if (!ctl.empty()) ctl[dst] = e.control[i];
  }
  e.position.swap(pos);
  e.velocity.swap(vel);
  e.cell.swap(cells);
  e.control.swap(ctl);
}

std::vector<std::size_t> uniform_cell_counts(std::size_t n, std::size_t cells) {
  if (cells == 0) throw ConfigError("cell count must be positive");
  std::vector<std::size_t> out(cells, n / cells);
  for (std::size_t c = 0; c < n % cells; ++c) ++out[c];
  return out;
}

std::vector<Vec3> initialize_maxwellian(std::size_t n, double temperature, const Vec3& bulk, const GasModel& gas,
                                        PointSource& source) {
  if (!(temperature >= 0.0)) throw ConfigError("initialize_maxwellian: temperature must be non-negative");
  const double s = gas.thermal_speed(temperature);
  std::vector<Vec3> out(n);
  std::array<double, 3> u;
  for (Vec3& v : out) {
    source.next(u);
    for (int k = 0; k < 3; ++k) v[k] = bulk[k] + s * normal_from_fraction(u[k]);
  }
  return out;
}

Vec3 cut_plane_normal(double angle_deg) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double s = std::sin(a) / std::numbers::sqrt2;
  return {-s, -s, std::cos(a)};
}

std::vector<Vec3> initialize_anisotropic_cut(std::size_t n, double angle_deg, PointSource& source) {
  if (n < 2) throw ConfigError("initialize_anisotropic_cut needs at least two particles");
  const Vec3 normal = cut_plane_normal(angle_deg);
  std::vector<Vec3> out;
  out.reserve(n);
  std::array<double, 3> u;
  while (out.size() < n) {
    source.next(u);
    const Vec3 v{normal_from_fraction(u[0]), normal_from_fraction(u[1]), normal_from_fraction(u[2])};
    if (dot(v, normal) > 0.0) continue;
    out.push_back(v);
  }
  center(out);
  for (int k = 0; k < 3; ++k) {
    double ss = 0.0;
    for (const Vec3& v : out) ss += v[k] * v[k];
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd > 0.0)
      for (Vec3& v : out) v[k] /= sd;
  }
  return out;
}

void center(std::span<Vec3> velocities) {
  if (velocities.empty()) return;
  Vec3 sum{};
  for (const Vec3& v : velocities) sum = sum + v;
  const Vec3 mean = (1.0 / static_cast<double>(velocities.size())) * sum;
  for (Vec3& v : velocities) v = v - mean;
}

void write_snapshot_csv(const ParticleEnsemble& e, std::ostream& out) {
  out << "x,y,z,vx,vy,vz,cell\n";
  out.precision(17);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Vec3& p = e.position[i];
    const Vec3& v = e.velocity[i];
    out << p[0] << ',' << p[1] << ',' << p[2] << ',' << v[0] << ',' << v[1] << ',' << v[2] << ','
        << (i < e.cell.size() ? e.cell[i] : 0u) << '\n';
  }
}

}  // namespace fpqmc
