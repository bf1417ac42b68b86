#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "fpqmc/gas.hpp"
#include "fpqmc/point_source.hpp"
#include "fpqmc/vec3.hpp"

namespace fpqmc {

/// Per-cell moment estimates. Energy and stress are per unit mass; the stress
/// is the symmetric, trace-free part of the second central moment.
struct CellMoments {
  std::size_t count = 0;
  Vec3 mean{};
  double energy = 0.0;
  std::array<std::array<double, 3>, 3> stress{};
  Vec3 heat_flux{};
  Vec3 stddev{};  // per-component population standard deviation

  bool empty() const { return count == 0; }
};

/// Sample moments of one cell's velocities. An empty span yields the empty
/// marker (count == 0, all moments zero).
CellMoments compute_moments(std::span<const Vec3> velocities);

/// Uniform 1-D grid along the wall-normal x axis.
struct Grid1D {
  std::size_t cells = 1;
  double length = 1.0;

  double width() const { return length / static_cast<double>(cells); }
};

/// Structure-of-arrays particle storage. After reassign_cells the particles
/// are grouped contiguously by cell, preserving their previous relative order.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(std::vector<Vec3> positions, std::vector<Vec3> velocities);

  std::size_t size() const { return velocity.size(); }
  std::size_t cells() const { return offsets.empty() ? 0 : offsets.size() - 1; }

  std::pair<std::size_t, std::size_t> cell_range(std::size_t cell) const { return {offsets[cell], offsets[cell + 1]}; }
  std::span<Vec3> cell_velocities(std::size_t cell);
  std::span<const Vec3> cell_velocities(std::size_t cell) const;

  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<std::uint32_t> cell;
  std::vector<std::size_t> offsets;
  /// Shadow velocities of a control process; permuted along with the
  /// particles when non-empty.
  std::vector<Vec3> control;
};

/// Assigns cell = floor(x / width) clamped to [0, cells - 1] and regroups the
/// particles by cell (stable). Throws StepError for a position outside [0, L].
void reassign_cells(ParticleEnsemble& ensemble, const Grid1D& grid);

/// Particles per cell when n particles are spread uniformly; the remainder
/// goes to the low-index cells.
std::vector<std::size_t> uniform_cell_counts(std::size_t n, std::size_t cells);

/// Maxwellian velocities: bulk + sqrt(kT/m) * Phi^{-1}(u) per component.
std::vector<Vec3> initialize_maxwellian(std::size_t n, double temperature, const Vec3& bulk, const GasModel& gas,
                                        PointSource& source);

/// Unit normal of the cutting plane: the x-y plane turned counterclockwise by
/// `angle_deg` about the in-plane diagonal (1, -1, 0) / sqrt(2).
Vec3 cut_plane_normal(double angle_deg);

/// Standard normal triples with the +normal half-space discarded, then mapped
/// affinely so every component has empirical mean 0 and variance 1 exactly.
std::vector<Vec3> initialize_anisotropic_cut(std::size_t n, double angle_deg, PointSource& source);

/// Removes the empirical mean (per component).
void center(std::span<Vec3> velocities);

/// Optional debug dump: x,y,z,vx,vy,vz,cell per particle.
void write_snapshot_csv(const ParticleEnsemble& ensemble, std::ostream& out);

}  // namespace fpqmc
