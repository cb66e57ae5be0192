#include "rcjhand/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "rcjhand/error.hpp"

namespace rcjhand {

namespace {

double blend(double s, Interpolation interpolation) {
  if (interpolation == Interpolation::cosine) return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
  return s;
}

Pose interpolate(const Pose& a, const Pose& b, double s) {
  Pose out;
  for (int f = 0; f < 5; ++f)
    for (int j = 0; j < 4; ++j) out.angles[f][j] = (1.0 - s) * a.angles[f][j] + s * b.angles[f][j];
  return out;
}

void check_times(const Trajectory& traj, std::string_view which) {
  if (traj.samples.empty()) throw Error(ErrorCode::no_overlap, std::string(which) + " trajectory is empty");
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    if (!(traj.samples[i].t > traj.samples[i - 1].t)) {
      throw Error(ErrorCode::validation_error, std::string(which) + " trajectory times must strictly increase");
    }
  }
}

using TipPath = std::vector<std::array<Eigen::Vector3d, 5>>;

TipPath smoothed(const Trajectory& traj, int width) {
  const int n = static_cast<int>(traj.samples.size());
  const int half = width / 2;
  TipPath out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    for (int f = 0; f < 5; ++f) {
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (int k = lo; k <= hi; ++k) sum += traj.samples[k].tips[f];
      out[i][f] = sum / (hi - lo + 1);
    }
  }
  return out;
}

// Linear interpolation of a tip path; nullopt outside its time range.
std::optional<std::array<Eigen::Vector3d, 5>> sample_at(const std::vector<double>& times, const TipPath& path,
                                                        double t) {
  constexpr double eps = 1e-12;
  if (t < times.front() - eps || t > times.back() + eps) return std::nullopt;
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return path.back();
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  if (*it == t || j == 0) return path[j];
  const double s = (t - times[j - 1]) / (times[j] - times[j - 1]);
  std::array<Eigen::Vector3d, 5> out;
  for (int f = 0; f < 5; ++f) out[f] = (1.0 - s) * path[j - 1][f] + s * path[j][f];
  return out;
}

// Sum of squared tip errors per finger of `a` against `b` shifted by `shift`, and the sample count.
std::pair<std::array<double, 5>, std::size_t> squared_error(const std::vector<double>& ta, const TipPath& pa,
                                                            const std::vector<double>& tb, const TipPath& pb,
                                                            double shift) {
  std::array<double, 5> sum{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const auto other = sample_at(tb, pb, ta[i] + shift);
    if (!other) continue;
    ++n;
    for (int f = 0; f < 5; ++f) sum[f] += (pa[i][f] - (*other)[f]).squaredNorm();
  }
  return {sum, n};
}

double sample_period(const std::vector<double>& t) {
  return t.size() < 2 ? 0.0 : (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

}  // namespace

Trajectory generate_trajectory(const HandModel& hand, std::span<const Pose> poses, const TrajectoryTiming& timing,
                               Interpolation interpolation) {
  if (poses.size() < 2) throw Error(ErrorCode::validation_error, "a trajectory needs at least two poses");
  if (timing.durations.size() != poses.size() - 1) {
    throw Error(ErrorCode::validation_error, "need exactly one duration per segment");
  }
  if (!(timing.rate_hz > 0.0)) throw Error(ErrorCode::validation_error, "sample rate must be > 0");
  std::vector<double> start{0.0};
  for (double d : timing.durations) {
    if (!(d > 0.0)) throw Error(ErrorCode::validation_error, "segment durations must be > 0");
    start.push_back(start.back() + d);
  }
  const double total = start.back();

  std::vector<double> times;
  const double ticks = total * timing.rate_hz;
  const auto whole = static_cast<long>(std::floor(ticks + 1e-9));
  for (long k = 0; k <= whole; ++k) times.push_back(static_cast<double>(k) / timing.rate_hz);
  if (std::abs(ticks - std::round(ticks)) <= 1e-9) {
    times.back() = total;
  } else {
    times.push_back(total);
  }

  Trajectory traj;
  std::size_t seg = 0;
  for (double t : times) {
    while (seg + 1 < timing.durations.size() && t >= start[seg + 1]) ++seg;
    const double s = std::clamp((t - start[seg]) / timing.durations[seg], 0.0, 1.0);
    TrajectorySample sample;
    sample.t = t;
    sample.pose = t == total ? poses.back() : interpolate(poses[seg], poses[seg + 1], blend(s, interpolation));
    const auto frames = hand_fk(hand, sample.pose, RomCheck::strict);
    for (int f = 0; f < 5; ++f) sample.tips[f] = frames[f].translation();
    traj.samples.push_back(sample);
  }
  return traj;
}

RmseResult trajectory_rmse(const Trajectory& a, const Trajectory& b, const RmseOptions& options) {
  check_times(a, "first");
  check_times(b, "second");
  if (options.smooth_width < 1 || options.smooth_width % 2 == 0) {
    throw Error(ErrorCode::validation_error, "smoothing width must be an odd number >= 1");
  }
  if (!(options.window_s >= 0.0)) throw Error(ErrorCode::validation_error, "alignment window must be >= 0");

  std::vector<double> ta, tb;
  for (const auto& s : a.samples) ta.push_back(s.t);
  for (const auto& s : b.samples) tb.push_back(s.t);
  const TipPath pa = smoothed(a, options.smooth_width);
  const TipPath pb = smoothed(b, options.smooth_width);

  const double period = std::max(sample_period(ta), sample_period(tb));
  const int reach = period > 0.0 ? static_cast<int>(std::floor(options.window_s / period + 1e-9)) : 0;
  // Shifts ordered 0, +p, -p, +2p, ... so ties keep the smallest shift.
  std::vector<double> shifts{0.0};
  for (int k = 1; k <= reach; ++k) {
    shifts.push_back(k * period);
    shifts.push_back(-k * period);
  }

  std::optional<RmseResult> best;
  for (double shift : shifts) {
    // b is compared at t + shift; symmetrized by sampling both ways.
    const auto [sab, nab] = squared_error(ta, pa, tb, pb, shift);
    const auto [sba, nba] = squared_error(tb, pb, ta, pa, -shift);
    if (nab == 0 || nba == 0) continue;
    RmseResult r;
    r.shift_s = shift;
    for (int f = 0; f < 5; ++f) {
      r.per_finger[f] = std::sqrt(0.5 * (sab[f] / nab + sba[f] / nba));
      r.aggregate += r.per_finger[f] / 5.0;
    }
    if (!best || r.aggregate < best->aggregate) best = r;
  }
  if (!best) throw Error(ErrorCode::no_overlap, "trajectories do not overlap in time");
  return *best;
}

Trajectory transformed(const Trajectory& traj, const RigidTransform& x) {
  Trajectory out = traj;
  for (auto& s : out.samples)
    for (auto& p : s.tips) p = x * p;
  return out;
}

}  // namespace rcjhand
