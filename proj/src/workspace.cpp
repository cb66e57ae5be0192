#include "rcjhand/workspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <numbers>
#include <utility>

#include "rcjhand/error.hpp"
#include "rcjhand/units.hpp"

namespace rcjhand {

namespace {

// The planar footprint of the flexion chain is deduplicated on a lattice of
// this fraction of the voxel edge before it is swept by the deviation joint.
constexpr double kFootprintPitch = 0.25;
// Footprint raster pitch of the membership test, as a fraction of the voxel edge.
constexpr double kMembershipPitch = 0.125;

int floor_index(double v, double edge) { return static_cast<int>(std::floor(v / edge)); }

std::vector<double> joint_samples(const JointGeometry& joint, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = joint.rom_min;
    return out;
  }
  const double step = (joint.rom_max - joint.rom_min) / (count - 1);
  for (int k = 0; k < count; ++k) out[k] = k == count - 1 ? joint.rom_max : joint.rom_min + k * step;
  return out;
}

// Samples over the joint's ROM so the tip moves at most `max_step` between neighbours.
int arc_samples(const FingerModel& finger, int j, double max_step) {
  const auto& joint = finger.joints[j];
  const double span = deg2rad(joint.rom_max - joint.rom_min);
  if (span <= 0.0) return 1;
  double reach = 2.0 * joint.radius;
  for (int k = j; k < 4; ++k) reach += finger.links[k].length;
  return static_cast<int>(std::ceil(reach * span / max_step)) + 1;
}

struct Point2 {
  double x;
  double z;
};

// Solutions of cos(phi) y + sin(phi) z = 2 r sin(phi / 2) on both branches.
// `window(lo, hi)` reports whether a branch's angle interval can hold an admissible root.
template <class W, class F>
void deviation_roots(double y, double z, double r, W&& window, F&& emit) {
  const double radius = std::hypot(y, z);
  if (radius <= 4.0 * r) {
    // Close to the joint: scan and bisect.
    constexpr int n = 720;
    auto g = [&](double phi) { return std::cos(phi) * y + std::sin(phi) * z - 2.0 * r * std::sin(0.5 * phi); };
    double a = -std::numbers::pi, ga = g(a);
    for (int i = 1; i <= n; ++i) {
      double b = -std::numbers::pi + 2.0 * std::numbers::pi * i / n, gb = g(b);
      if (ga == 0.0) emit(a);
      if (ga * gb < 0.0) {
        double lo = a, hi = b, glo = ga;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi), gm = g(mid);
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        emit(0.5 * (lo + hi));
      }
      a = b;
      ga = gb;
    }
    return;
  }
  // radius * sin(phi + delta) = 2 r sin(phi / 2); each branch root lies
  // within asin(2 r / radius) of its base angle and Newton converges from there.
  const double delta = std::atan2(y, z);
  const double spread = std::asin(2.0 * r / radius);
  for (int branch = 0; branch < 2; ++branch) {
    const double base = std::remainder(-delta + (branch ? std::numbers::pi : 0.0), 2.0 * std::numbers::pi);
    if (!window(base - spread, base + spread)) continue;
    double phi = base;
    for (int it = 0; it < 30; ++it) {
      const double h = radius * std::sin(phi + delta) - 2.0 * r * std::sin(0.5 * phi);
      const double dh = radius * std::cos(phi + delta) - r * std::cos(0.5 * phi);
      const double step = h / dh;
      phi -= step;
      if (std::abs(step) < 1e-12) break;
    }
    emit(phi);
  }
}

}  // namespace

VoxelGrid::VoxelGrid(double edge, const Eigen::Vector3i& lo, const Eigen::Vector3i& hi)
    : edge_(edge), lo_(lo), hi_(hi) {
  if (!(edge > 0.0)) throw Error(ErrorCode::invalid_geometry, "voxel edge must be positive");
  dims_ = (hi - lo).array() + 1;
  if ((dims_.array() <= 0).any()) throw Error(ErrorCode::invalid_geometry, "voxel box is empty");
  const std::size_t n = static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  bits_.assign((n + 63) / 64, 0);
}

Eigen::Vector3i VoxelGrid::index_of(const Eigen::Vector3d& p) const {
  return {floor_index(p.x(), edge_), floor_index(p.y(), edge_), floor_index(p.z(), edge_)};
}

bool VoxelGrid::contains_index(const Eigen::Vector3i& k) const {
  return (k.array() >= lo_.array()).all() && (k.array() <= hi_.array()).all();
}

std::size_t VoxelGrid::linear(const Eigen::Vector3i& k) const {
  const Eigen::Vector3i d = k - lo_;
  return (static_cast<std::size_t>(d.x()) * dims_.y() + d.y()) * dims_.z() + d.z();
}

bool VoxelGrid::occupied(const Eigen::Vector3i& k) const {
  if (!contains_index(k)) return false;
  const std::size_t i = linear(k);
  return (bits_[i / 64] >> (i % 64)) & 1u;
}

void VoxelGrid::set(const Eigen::Vector3i& k) {
  if (!contains_index(k)) throw Error(ErrorCode::invalid_geometry, "voxel index outside grid box");
  const std::size_t i = linear(k);
  bits_[i / 64] |= std::uint64_t{1} << (i % 64);
}

void VoxelGrid::insert(const Eigen::Vector3d& p) { set(index_of(p)); }

std::size_t VoxelGrid::count() const {
  std::size_t n = 0;
  for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<Eigen::Vector3d> VoxelGrid::occupied_centers() const {
  std::vector<Eigen::Vector3d> out;
  for (int x = lo_.x(); x <= hi_.x(); ++x)
    for (int y = lo_.y(); y <= hi_.y(); ++y)
      for (int z = lo_.z(); z <= hi_.z(); ++z)
        if (occupied({x, y, z})) out.emplace_back((x + 0.5) * edge_, (y + 0.5) * edge_, (z + 0.5) * edge_);
  return out;
}

VoxelGrid VoxelGrid::rerasterized(double edge) const {
  const auto centers = occupied_centers();
  if (centers.empty()) return VoxelGrid(edge, Eigen::Vector3i::Zero(), Eigen::Vector3i::Zero());
  Eigen::Vector3i lo = Eigen::Vector3i::Constant(std::numeric_limits<int>::max());
  Eigen::Vector3i hi = Eigen::Vector3i::Constant(std::numeric_limits<int>::min());
  for (const auto& c : centers) {
    const Eigen::Vector3i k(floor_index(c.x(), edge), floor_index(c.y(), edge), floor_index(c.z(), edge));
    lo = lo.cwiseMin(k);
    hi = hi.cwiseMax(k);
  }
  VoxelGrid out(edge, lo, hi);
  for (const auto& c : centers) out.insert(c);
  return out;
}

std::array<int, 4> effective_steps(const FingerModel& finger, const SamplerSpec& spec) {
  if (!(spec.voxel_edge > 0.0) || !(spec.gap_fraction > 0.0)) {
    throw Error(ErrorCode::invalid_geometry, "voxel edge and gap fraction must be positive");
  }
  std::array<int, 4> out{};
  for (int j = 0; j < 4; ++j) {
    const auto& joint = finger.joints[j];
    if (joint.rom_max < joint.rom_min) {
      throw Error(ErrorCode::empty_rom, "joint " + std::to_string(j) + " has an empty ROM");
    }
    if (spec.steps[j] < 1) throw Error(ErrorCode::invalid_geometry, "sampler steps must be >= 1");
    const double span = deg2rad(joint.rom_max - joint.rom_min);
    if (span == 0.0 || spec.steps[j] == 1) {
      out[j] = 1;
      continue;
    }
    // Distance from the joint to the tip bounds the tip speed per radian.
    double reach = 2.0 * joint.radius;
    for (int k = j; k < 4; ++k) reach += finger.links[k].length;
    const int intervals = spec.steps[j] - 1;
    const double needed = reach * span / intervals / (spec.gap_fraction * spec.voxel_edge);
    unsigned sub = 1;
    while (sub < needed) sub <<= 1;
    out[j] = intervals * static_cast<int>(sub) + 1;
  }
  return out;
}

VoxelGrid sample_workspace(const HandModel& hand, Finger which, const SamplerSpec& spec) {
  const FingerModel& finger = hand.finger(which);
  const auto steps = effective_steps(finger, spec);
  const double edge = spec.voxel_edge;
  const double pitch = kFootprintPitch * edge;

  // Flexion chain (joints 1-3) is planar in the x-z plane of J_0.
  std::array<std::vector<RigidTransform>, 4> rolls;
  for (int j = 0; j < 4; ++j) {
    const auto& joint = finger.joints[j];
    for (double a : joint_samples(joint, steps[j])) rolls[j].push_back(roll_transform(joint.radius, joint.axis, a));
  }
  const RigidTransform t0 = link_offset(finger, 0), t1 = link_offset(finger, 1), t2 = link_offset(finger, 2);
  const Eigen::Vector3d tip_point = link_offset(finger, 3).translation();
  std::vector<Eigen::Vector3d> distal;
  for (const auto& r3 : rolls[3]) distal.push_back(r3 * tip_point);

  std::vector<std::pair<int, int>> footprint;
  for (const auto& r1 : rolls[1]) {
    const RigidTransform a1 = t0 * r1 * t1;
    for (const auto& r2 : rolls[2]) {
      const RigidTransform a2 = a1 * r2 * t2;
      for (const auto& q : distal) {
        const Eigen::Vector3d p = a2 * q;
        footprint.emplace_back(floor_index(p.x(), pitch), floor_index(p.z(), pitch));
      }
    }
  }
  std::sort(footprint.begin(), footprint.end());
  footprint.erase(std::unique(footprint.begin(), footprint.end()), footprint.end());

  std::vector<Eigen::Vector3d> centers;
  centers.reserve(footprint.size());
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin, zmin = xmin, zmax = -xmin;
  for (const auto& [ix, iz] : footprint) {
    const Eigen::Vector3d c((ix + 0.5) * pitch, 0.0, (iz + 0.5) * pitch);
    xmin = std::min(xmin, c.x());
    xmax = std::max(xmax, c.x());
    zmin = std::min(zmin, c.z());
    zmax = std::max(zmax, c.z());
    centers.push_back(c);
  }

  const RigidTransform& placement = hand.placement(which);
  std::vector<RigidTransform> sweeps;
  for (const auto& r0 : rolls[0]) sweeps.push_back(placement * r0);

  // The image of the footprint lies in the hull of its bounding rectangle's image.
  Eigen::Vector3i lo = Eigen::Vector3i::Constant(std::numeric_limits<int>::max());
  Eigen::Vector3i hi = Eigen::Vector3i::Constant(std::numeric_limits<int>::min());
  for (const auto& m : sweeps) {
    for (double x : {xmin, xmax}) {
      for (double z : {zmin, zmax}) {
        const Eigen::Vector3d p = m * Eigen::Vector3d(x, 0.0, z);
        const Eigen::Vector3i k(floor_index(p.x(), edge), floor_index(p.y(), edge), floor_index(p.z(), edge));
        lo = lo.cwiseMin(k);
        hi = hi.cwiseMax(k);
      }
    }
  }
  VoxelGrid grid(edge, lo, hi);
  for (const auto& m : sweeps) {
    for (const auto& c : centers) grid.insert(m * c);
  }
  return grid;
}

ReachableSet::ReachableSet(const HandModel& hand, Finger which, double pitch) : pitch_(pitch) {
  if (!(pitch > 0.0)) throw Error(ErrorCode::invalid_geometry, "footprint pitch must be positive");
  const FingerModel& finger = hand.finger(which);
  for (const auto& joint : finger.joints) {
    if (joint.rom_max < joint.rom_min) throw Error(ErrorCode::empty_rom, "joint has an empty ROM");
  }
  to_origin_ = hand.placement(which).inverse();
  r0_ = finger.joints[0].radius;
  phi_lo_ = deg2rad(finger.joints[0].rom_min);
  phi_hi_ = deg2rad(finger.joints[0].rom_max);

  // Tip positions over (theta2, theta3) in the frame after link 1's offset.
  const double step = 4.0 * pitch;
  const int n1 = arc_samples(finger, 1, step), n2 = arc_samples(finger, 2, step), n3 = arc_samples(finger, 3, step);
  std::array<std::vector<RigidTransform>, 4> rolls;
  const std::array<int, 4> counts{1, n1, n2, n3};
  for (int j = 1; j < 4; ++j) {
    const auto& joint = finger.joints[j];
    for (double a : joint_samples(joint, counts[j])) rolls[j].push_back(roll_transform(joint.radius, joint.axis, a));
  }
  const RigidTransform t0 = link_offset(finger, 0), t1 = link_offset(finger, 1), t2 = link_offset(finger, 2);
  const Eigen::Vector3d tip = link_offset(finger, 3).translation();
  std::vector<Eigen::Vector3d> grid;
  grid.reserve(static_cast<std::size_t>(n2) * n3);
  for (const auto& r2 : rolls[2]) {
    const RigidTransform a2 = r2 * t2;
    for (const auto& r3 : rolls[3]) grid.push_back(a2 * (r3 * tip));
  }
  std::vector<RigidTransform> slices;
  for (const auto& r1 : rolls[1]) slices.push_back(t0 * r1 * t1);

  double xmin = std::numeric_limits<double>::max(), xmax = -xmin, zmin = xmin, zmax = -xmin;
  for (const auto& m : slices) {
    for (const auto& g : grid) {
      const Eigen::Vector3d p = m * g;
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      zmin = std::min(zmin, p.z());
      zmax = std::max(zmax, p.z());
    }
  }
  ix0_ = floor_index(xmin, pitch) - 1;
  iz0_ = floor_index(zmin, pitch) - 1;
  nx_ = floor_index(xmax, pitch) - ix0_ + 2;
  nz_ = floor_index(zmax, pitch) - iz0_ + 2;
  raster_.assign(static_cast<std::size_t>(nx_) * nz_, 0);

  // Each parameter cell is filled as two triangles; a pixel belongs to the
  // footprint when its centre lies in any of them.
  auto fill = [&](const Point2& a, const Point2& b, const Point2& c) {
    const double area = (b.x - a.x) * (c.z - a.z) - (b.z - a.z) * (c.x - a.x);
    if (area == 0.0) return;
    const double sgn = area > 0.0 ? 1.0 : -1.0;
    const int i_lo = static_cast<int>(std::ceil(std::min({a.x, b.x, c.x}) / pitch - 0.5));
    const int i_hi = static_cast<int>(std::floor(std::max({a.x, b.x, c.x}) / pitch - 0.5));
    const int k_lo = static_cast<int>(std::ceil(std::min({a.z, b.z, c.z}) / pitch - 0.5));
    const int k_hi = static_cast<int>(std::floor(std::max({a.z, b.z, c.z}) / pitch - 0.5));
    for (int i = i_lo; i <= i_hi; ++i) {
      const double x = (i + 0.5) * pitch;
      for (int k = k_lo; k <= k_hi; ++k) {
        const double z = (k + 0.5) * pitch;
        const double e0 = sgn * ((b.x - a.x) * (z - a.z) - (b.z - a.z) * (x - a.x));
        const double e1 = sgn * ((c.x - b.x) * (z - b.z) - (c.z - b.z) * (x - b.x));
        const double e2 = sgn * ((a.x - c.x) * (z - c.z) - (a.z - c.z) * (x - c.x));
        if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) {
          raster_[static_cast<std::size_t>(i - ix0_) * nz_ + (k - iz0_)] = 1;
        }
      }
    }
  };
  std::vector<Point2> pts(grid.size());
  for (const auto& m : slices) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Eigen::Vector3d p = m * grid[i];
      pts[i] = {p.x(), p.z()};
    }
    for (int i = 0; i + 1 < n2; ++i) {
      for (int k = 0; k + 1 < n3; ++k) {
        const Point2& p00 = pts[static_cast<std::size_t>(i) * n3 + k];
        const Point2& p01 = pts[static_cast<std::size_t>(i) * n3 + k + 1];
        const Point2& p10 = pts[static_cast<std::size_t>(i + 1) * n3 + k];
        const Point2& p11 = pts[static_cast<std::size_t>(i + 1) * n3 + k + 1];
        fill(p00, p10, p11);
        fill(p00, p11, p01);
      }
    }
  }
}

bool ReachableSet::in_footprint(double x, double z) const {
  const int i = floor_index(x, pitch_) - ix0_;
  const int k = floor_index(z, pitch_) - iz0_;
  if (i < 0 || k < 0 || i >= nx_ || k >= nz_) return false;
  return raster_[static_cast<std::size_t>(i) * nz_ + k] != 0;
}

bool ReachableSet::contains(const Eigen::Vector3d& palm_point) const {
  const Eigen::Vector3d q = to_origin_ * palm_point;
  bool hit = false;
  // sin(phi / 2) is not 2 pi periodic, so roots are taken in (-pi, pi] only.
  auto window = [&](double lo, double hi) { return hi >= phi_lo_ - 1e-9 && lo <= phi_hi_ + 1e-9; };
  deviation_roots(q.y(), q.z(), r0_, window, [&](double phi) {
    if (hit || phi < phi_lo_ - 1e-12 || phi > phi_hi_ + 1e-12) return;
    const double z = -std::sin(phi) * q.y() + std::cos(phi) * q.z() - 2.0 * r0_ * std::cos(0.5 * phi);
    hit = in_footprint(q.x(), z);
  });
  return hit;
}

double ReachableSet::footprint_area_mm2() const {
  std::size_t n = 0;
  for (auto v : raster_) n += v;
  return static_cast<double>(n) * pitch_ * pitch_;
}

double shared_coverage_volume(const VoxelGrid& a, const ReachableSet& sa, const VoxelGrid& b, const ReachableSet& sb,
                              int k) {
  if (std::abs(a.edge() - b.edge()) > 1e-12 * std::max(a.edge(), b.edge())) {
    throw Error(ErrorCode::resolution_mismatch, "voxel edges differ");
  }
  if (k < 1) throw Error(ErrorCode::invalid_geometry, "coverage sub-samples must be >= 1");
  auto near = [](const VoxelGrid& g, const Eigen::Vector3i& v) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz)
          if (g.occupied(v + Eigen::Vector3i(dx, dy, dz))) return true;
    return false;
  };
  const double e = a.edge();
  const Eigen::Vector3i lo = (a.lo().cwiseMax(b.lo()).array() - 1).matrix();
  const Eigen::Vector3i hi = (a.hi().cwiseMin(b.hi()).array() + 1).matrix();
  std::size_t hits = 0;
  for (int x = lo.x(); x <= hi.x(); ++x) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      for (int z = lo.z(); z <= hi.z(); ++z) {
        const Eigen::Vector3i v(x, y, z);
        if (!near(a, v) || !near(b, v)) continue;
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            for (int l = 0; l < k; ++l) {
              const Eigen::Vector3d p((x + (i + 0.5) / k) * e, (y + (j + 0.5) / k) * e, (z + (l + 0.5) / k) * e);
              if (sa.contains(p) && sb.contains(p)) ++hits;
            }
      }
    }
  }
  const double sub = e / k;
  return static_cast<double>(hits) * sub * sub * sub * 1e-3;
}

double intersect_volume(const VoxelGrid& a, const VoxelGrid& b, bool rerasterize) {
  if (std::abs(a.edge() - b.edge()) > 1e-12 * std::max(a.edge(), b.edge())) {
    if (!rerasterize) throw Error(ErrorCode::resolution_mismatch, "voxel edges differ");
    if (a.edge() < b.edge()) return intersect_volume(a.rerasterized(b.edge()), b, false);
    return intersect_volume(a, b.rerasterized(a.edge()), false);
  }
  const Eigen::Vector3i lo = a.lo().cwiseMax(b.lo());
  const Eigen::Vector3i hi = a.hi().cwiseMin(b.hi());
  std::size_t n = 0;
  for (int x = lo.x(); x <= hi.x(); ++x)
    for (int y = lo.y(); y <= hi.y(); ++y)
      for (int z = lo.z(); z <= hi.z(); ++z)
        if (a.occupied({x, y, z}) && b.occupied({x, y, z})) ++n;
  const double e = a.edge();
  return static_cast<double>(n) * e * e * e * 1e-3;
}

OpposabilityReport opposability_index(const HandModel& hand, const std::array<double, 4>& weights,
                                      const SamplerSpec& spec) {
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::validation_error, "opposability weights must be >= 0");
  }
  if (!(hand.thumb_length > 0.0)) throw Error(ErrorCode::validation_error, "thumb length d must be > 0");
  OpposabilityReport report;
  report.weights = weights;
  report.thumb_length = hand.thumb_length;
  std::array<VoxelGrid, 5> grids;
  for (Finger f : kAllFingers) {
    grids[static_cast<int>(f)] = sample_workspace(hand, f, spec);
    report.workspace_volume_cm3[static_cast<int>(f)] = grids[static_cast<int>(f)].volume_cm3();
  }
  std::optional<ReachableSet> thumb;
  if (spec.coverage > 0) thumb.emplace(hand, Finger::thumb, kMembershipPitch * spec.voxel_edge);
  double weighted_mm3 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Finger f = kOpposedFingers[i];
    const VoxelGrid& g = grids[static_cast<int>(f)];
    report.shared_volume_cm3[i] =
        spec.coverage > 0
            ? shared_coverage_volume(grids[0], *thumb, g, ReachableSet(hand, f, kMembershipPitch * spec.voxel_edge),
                                     spec.coverage)
            : intersect_volume(grids[0], g);
    weighted_mm3 += weights[i] * report.shared_volume_cm3[i] * 1e3;
  }
  const double d = hand.thumb_length;
  report.index = weighted_mm3 / (d * d * d);
  return report;
}

}  // namespace rcjhand
