#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rcjhand/kinematics.hpp"

namespace rcjhand {

/// Occupancy grid on the global lattice {k * edge}: voxel k covers
/// [k*edge, (k+1)*edge) on each axis. Grids with equal edges are always
/// index-aligned.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  /// Empty grid spanning voxel indices [lo, hi] inclusive.
  VoxelGrid(double edge, const Eigen::Vector3i& lo, const Eigen::Vector3i& hi);

  double edge() const { return edge_; }
  const Eigen::Vector3i& lo() const { return lo_; }
  const Eigen::Vector3i& hi() const { return hi_; }
  Eigen::Vector3d origin() const { return lo_.cast<double>() * edge_; }

  Eigen::Vector3i index_of(const Eigen::Vector3d& p) const;
  bool contains_index(const Eigen::Vector3i& k) const;
  bool occupied(const Eigen::Vector3i& k) const;
  /// Marks the voxel holding `p`; throws if outside the box.
  void insert(const Eigen::Vector3d& p);
  void set(const Eigen::Vector3i& k);

  std::size_t count() const;
  double volume_mm3() const { return static_cast<double>(count()) * edge_ * edge_ * edge_; }
  double volume_cm3() const { return volume_mm3() * 1e-3; }

  /// Occupied voxel centres in x-major, then y, then z order.
  std::vector<Eigen::Vector3d> occupied_centers() const;

  /// Same occupancy on a lattice with a different edge (centre-point mapping).
  VoxelGrid rerasterized(double edge) const;

 private:
  std::size_t linear(const Eigen::Vector3i& k) const;

  double edge_ = 1.0;
  Eigen::Vector3i lo_ = Eigen::Vector3i::Zero();
  Eigen::Vector3i hi_ = Eigen::Vector3i::Constant(-1);
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
  std::vector<std::uint64_t> bits_;
};

struct SamplerSpec {
  std::array<int, 4> steps = {15, 15, 15, 15};  // base grid per joint (>= 1)
  double voxel_edge = 2.0;                      // [mm]
  /// Each base interval is split into a power of two of sub-steps so that a
  /// single sub-step moves the tip by at most gap_fraction * voxel_edge.
  double gap_fraction = 0.5;
  /// Shared volumes count k^3 sub-samples per candidate voxel against exact
  /// set membership; 0 falls back to plain voxel-count intersection.
  int coverage = 4;

  static SamplerSpec with_steps(int n, double edge = 2.0) { return {{n, n, n, n}, edge, 0.5, 4}; }
};

/// Effective per-joint sample counts after sub-step refinement.
std::array<int, 4> effective_steps(const FingerModel& finger, const SamplerSpec& spec);

/// Voxels containing reachable tip points over the finger's full ROM, in palm coordinates.
VoxelGrid sample_workspace(const HandModel& hand, Finger finger, const SamplerSpec& spec = {});

/// Intersection volume [cm^3]. Mismatched edges throw resolution_mismatch
/// unless `rerasterize` is set, in which case the finer grid is mapped onto the coarser lattice.
double intersect_volume(const VoxelGrid& a, const VoxelGrid& b, bool rerasterize = false);

/// Membership test for one finger's reachable tip set. The planar flexion
/// footprint is rasterized from triangles at `pitch`; the deviation joint is
/// inverted analytically.
class ReachableSet {
 public:
  ReachableSet(const HandModel& hand, Finger finger, double pitch);

  bool contains(const Eigen::Vector3d& palm_point) const;
  double footprint_area_mm2() const;
  double pitch() const { return pitch_; }

 private:
  bool in_footprint(double x, double z) const;

  RigidTransform to_origin_;
  double r0_ = 0.0;
  double phi_lo_ = 0.0;  // [rad]
  double phi_hi_ = 0.0;
  double pitch_ = 0.0;
  int ix0_ = 0, iz0_ = 0, nx_ = 0, nz_ = 0;
  std::vector<std::uint8_t> raster_;
};

/// Volume [cm^3] reachable by both sets, from k^3 sub-samples in every voxel
/// within one voxel of the occupancy of both grids.
double shared_coverage_volume(const VoxelGrid& a, const ReachableSet& sa, const VoxelGrid& b, const ReachableSet& sb,
                              int k);

struct OpposabilityReport {
  std::array<double, 4> shared_volume_cm3{};  // index, middle, ring, little
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};
  std::array<double, 5> workspace_volume_cm3{};  // voxel occupancy: thumb, index, ..., little
  double thumb_length = 0.0;                     // d [mm]
  double index = 0.0;                            // J
};

OpposabilityReport opposability_index(const HandModel& hand, const std::array<double, 4>& weights = {1, 1, 1, 1},
                                      const SamplerSpec& spec = {});

}  // namespace rcjhand
