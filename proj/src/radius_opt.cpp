#include "rcjhand/radius_opt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcjhand/cable.hpp"
#include "rcjhand/error.hpp"

namespace rcjhand {

namespace {

constexpr int kCoarseSamples = 64;
constexpr double kFallbackSpacing = 0.01;  // [mm]
constexpr double kScanTol = 1e-12;

struct Probe {
  double r;
  double f;
};

bool is_unimodal(const std::vector<Probe>& scan, std::size_t best) {
  for (std::size_t i = 1; i <= best; ++i) {
    if (scan[i].f > scan[i - 1].f + kScanTol) return false;
  }
  for (std::size_t i = best + 1; i < scan.size(); ++i) {
    if (scan[i].f + kScanTol < scan[i - 1].f) return false;
  }
  return true;
}

std::size_t argmin(const std::vector<Probe>& scan) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (scan[i].f < scan[best].f) best = i;  // strict: ties keep the smaller r
  }
  return best;
}

template <typename F>
Probe golden_section(F&& f, double a, double b, double tol, Probe best) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  auto consider = [&best](double r, double v) {
    if (v < best.f || (v == best.f && r < best.r)) best = {r, v};
  };
  consider(c, fc);
  consider(d, fd);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace

RadiusProblem RadiusProblem::flexion(double kappa, double beta_deg) {
  RadiusProblem p;
  p.axis = JointAxis::flexion_y;
  p.moment_arm = kappa;
  p.rom_min = 0.0;
  p.rom_max = 2.0 * beta_deg;
  p.r_lo = 0.05 * kappa;
  p.r_hi = 0.95 * kappa;
  return p;
}

RadiusProblem RadiusProblem::deviation(double gamma, double alpha_deg) {
  RadiusProblem p;
  p.axis = JointAxis::deviation_x;
  p.moment_arm = gamma;
  p.rom_min = -2.0 * alpha_deg;
  p.rom_max = 2.0 * alpha_deg;
  p.r_lo = 0.05 * gamma;
  p.r_hi = 0.95 * gamma;
  return p;
}

RadiusProblem RadiusProblem::for_joint(const JointGeometry& joint) {
  RadiusProblem p = joint.axis == JointAxis::flexion_y ? flexion(joint.flex_offset, joint.surface_angle)
                                                       : deviation(joint.lateral_spacing, joint.surface_angle);
  p.rom_min = joint.rom_min;
  p.rom_max = joint.rom_max;
  return p;
}

JointGeometry RadiusProblem::joint(double r) const {
  JointGeometry j;
  j.axis = axis;
  j.radius = r;
  j.flex_offset = moment_arm;
  j.lateral_spacing = moment_arm;
  j.rom_min = rom_min;
  j.rom_max = rom_max;
  j.surface_angle = axis == JointAxis::flexion_y ? 0.5 * (rom_max - rom_min) : 0.25 * (rom_max - rom_min);
  return j;
}

std::vector<double> RadiusProblem::sample_angles() const {
  std::vector<double> out;
  const double span = rom_max - rom_min;
  const int n = std::max(1, static_cast<int>(std::ceil(span / step_deg - 1e-9)));
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back(k == n ? rom_max : rom_min + k * step_deg);
  return out;
}

double residual(const RadiusProblem& problem, double r, std::span<const double> angles_deg) {
  const JointGeometry j = problem.joint(r);
  double worst = 0.0;
  for (double a : angles_deg) {
    worst = std::max(worst, std::abs(cable_deviation(j, a, std::nullopt, RomCheck::none).sum()));
  }
  return worst;
}

double residual(const RadiusProblem& problem, double r) {
  const auto angles = problem.sample_angles();
  return residual(problem, r, angles);
}

RadiusOptimum optimize_radius(const RadiusProblem& problem) {
  if (!(problem.r_lo > 0.0 && problem.r_hi > problem.r_lo && problem.r_hi < problem.moment_arm)) {
    throw Error(ErrorCode::invalid_geometry, "search interval must lie inside (0, moment arm)");
  }
  if (!(problem.step_deg > 0.0 && problem.step_deg <= 1.0)) {
    throw Error(ErrorCode::invalid_geometry, "ROM step must be in (0, 1] deg");
  }
  const auto angles = problem.sample_angles();
  auto objective = [&](double r) { return residual(problem, r, angles); };

  std::vector<Probe> scan;
  scan.reserve(kCoarseSamples);
  const double h = (problem.r_hi - problem.r_lo) / (kCoarseSamples - 1);
  for (int k = 0; k < kCoarseSamples; ++k) {
    const double r = k == kCoarseSamples - 1 ? problem.r_hi : problem.r_lo + k * h;
    scan.push_back({r, objective(r)});
  }
  std::size_t best = argmin(scan);
  const bool unimodal = is_unimodal(scan, best);
  RadiusOptimum out;

  if (!unimodal) {
    out.used_fallback = true;
    const int n = static_cast<int>(std::ceil((problem.r_hi - problem.r_lo) / kFallbackSpacing)) + 1;
    const double step = (problem.r_hi - problem.r_lo) / (n - 1);
    scan.clear();
    for (int k = 0; k < n; ++k) {
      const double r = k == n - 1 ? problem.r_hi : problem.r_lo + k * step;
      scan.push_back({r, objective(r)});
    }
    best = argmin(scan);
  } else if (best == 0 || best == scan.size() - 1) {
    std::ostringstream os;
    os << "residual decreases monotonically towards r = " << scan[best].r << " mm";
    throw Error(ErrorCode::no_minimum_found, os.str());
  }

  const double a = scan[best == 0 ? 0 : best - 1].r;
  const double b = scan[std::min(best + 1, scan.size() - 1)].r;
  const Probe p = golden_section(objective, a, b, problem.tolerance, scan[best]);
  out.radius = p.r;
  out.residual = p.f;
  return out;
}

SweepResult sweep(std::span<const double> kappas, std::span<const double> betas_deg) {
  if (kappas.empty() || betas_deg.empty()) throw Error(ErrorCode::invalid_geometry, "sweep grids must be non-empty");
  SweepResult result;
  for (double kappa : kappas) {
    for (double beta : betas_deg) {
      SweepCell cell{kappa, beta, std::nullopt, {}};
      try {
        cell.optimum = optimize_radius(RadiusProblem::flexion(kappa, beta));
      } catch (const Error& e) {
        cell.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace rcjhand
