// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcjhand/actuation.hpp"
#include "rcjhand/cable.hpp"
#include "rcjhand/csv.hpp"
#include "rcjhand/radius_opt.hpp"
#include "rcjhand/trajectory.hpp"
#include "rcjhand/units.hpp"
#include "rcjhand/workspace.hpp"

namespace fs = std::filesystem;
using namespace rcjhand;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_++ < 5) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& s) { info_ << (info_.tellp() > 0 ? ", " : "") << s; }
  Outcome outcome() const {
    std::string d = info_.str();
    if (!pass_) d += (d.empty() ? "" : " | ") + std::string("failed: ") + notes_.str();
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::ostringstream notes_, info_;
};

std::string num(double v, int digits = 4) { return format_number(v, digits); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome radius_sweep() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> kappas{6, 7, 8, 9, 10, 11, 12, 13}, betas{30, 40, 50, 60};
  const auto result = sweep(kappas, betas);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (const auto& cell : result.cells) {
    c.require(cell.optimum.has_value(), "kappa " + num(cell.kappa, 1) + " beta " + num(cell.beta, 0) + ": " + cell.error);
    if (cell.optimum) worst = std::max(worst, cell.optimum->residual);
  }
  c.require(result.cells.size() == 32, "expected 32 cells");
  c.require(worst <= 0.03, "worst residual " + num(worst, 6) + " mm > 0.03 mm");
  c.require(elapsed < 5.0, "runtime " + num(elapsed, 2) + " s");
  c.note("32 cells, worst residual " + num(worst, 6) + " mm, " + num(elapsed, 2) + " s");
  return c.outcome();
}

Outcome radius_recovery(const fs::path& report_dir) {
  Check c;
  std::ostringstream csv;
  csv << "finger,joint,axis,moment_arm_mm,surface_angle_deg,r_shipped_mm,r_opt_mm,delta_mm,residual_mm\n";
  double worst = 0.0;
  int rows = 0;
  for (const auto& finger : {default_thumb(), default_finger()}) {
    for (int j = 0; j < 4; ++j) {
      const auto& joint = finger.joints[j];
      const auto opt = optimize_radius(RadiusProblem::for_joint(joint));
      const double delta = opt.radius - joint.radius;
      worst = std::max(worst, std::abs(delta));
      ++rows;
      csv << to_string(finger.kind) << ',' << j << ','
          << (joint.axis == JointAxis::flexion_y ? "flexion" : "deviation") << ',' << num(joint.moment_arm(), 3) << ','
          << num(joint.surface_angle, 3) << ',' << num(joint.radius, 3) << ',' << num(opt.radius, 4) << ','
          << num(delta, 4) << ',' << num(opt.residual, 6) << "\n";
      c.require(std::abs(delta) <= 0.5, std::string(to_string(finger.kind)) + " joint " + std::to_string(j) +
                                            " off by " + num(delta, 3) + " mm");
    }
  }
  const fs::path report = report_dir / "radius_recovery.csv";
  write_text(report, csv.str());
  c.note(std::to_string(rows) + " joints, worst |delta| " + num(worst, 4) + " mm, report " + report.string());
  return c.outcome();
}

Outcome fk_invariants() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& finger : {default_thumb(), default_finger()}) {
    auto inset = [](const JointGeometry& j) { return j.flex_offset - j.radius * std::tan(deg2rad(0.5 * j.surface_angle)); };
    const Eigen::Vector3d expected(inset(finger.joints[3]) - inset(finger.joints[1]), 0.0,
                                   finger.total_length() + finger.joints[0].radius);
    const double err = (finger_fk(finger, {0, 0, 0, 0}).tip().translation() - expected).norm();
    c.require(err <= 1e-9, "zero-pose error " + std::to_string(err));
    for (int j = 0; j < 4; ++j) {
      const auto& jg = finger.joints[j];
      const double factor = jg.axis == JointAxis::flexion_y ? 2.0 : 4.0;
      c.require(std::abs((jg.rom_max - jg.rom_min) - factor * jg.surface_angle) <= 1e-12,
                "ROM / surface angle mismatch at joint " + std::to_string(j));
    }
  }
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_transform = [&] {
    return RigidTransform::from_axis_angle({u(rng), u(rng), u(rng) + 1.5}, 180.0 * u(rng),
                                           {60 * u(rng), 60 * u(rng), 60 * u(rng)});
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_transform(), b = random_transform(), d = random_transform();
    c.require(approx_equal((a * b) * d, a * (b * d), 1e-9), "associativity");
    c.require(approx_equal(a * a.inverse(), RigidTransform::identity(), 1e-12), "inverse");
    c.require(approx_equal(RigidTransform::identity() * a, a, 0.0), "identity");
    c.require((a * b).is_proper(1e-12), "closure");
  }
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 1.0, "runtime " + num(elapsed, 3) + " s");
  c.note("zero pose, 1000 group-law samples, ROM consistency, " + num(elapsed, 3) + " s");
  return c.outcome();
}

Outcome antagonistic_pairing() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto hand = default_hand();
  double worst = 0.0, worst_invariance = 0.0;
  for (Finger f : kAllFingers) {
    const auto& finger = hand.finger(f);
    const auto& plan = routing_plan(finger.kind);
    for (int j = 0; j < 4; ++j) {
      const auto& joint = finger.joints[j];
      const int n = static_cast<int>(std::llround((joint.rom_max - joint.rom_min) / 0.5));
      for (int k = 0; k <= n; ++k) {
        const double a = k == n ? joint.rom_max : joint.rom_min + 0.5 * k;
        JointAngles q{0, 0, 0, 0};
        q[j] = a;
        for (const auto& pair : plan.pairs) {
          const auto& t = plan.tendon(pair.flexor);
          if (!t.traverses(j)) continue;
          const double dev = std::abs(paired_deviation(finger, q, pair.name));
          worst = std::max(worst, dev);
          c.require(dev <= 0.05, std::string(to_string(f)) + "/" + pair.name + " at joint " + std::to_string(j) +
                                     " angle " + num(a, 1) + ": " + num(dev, 4) + " mm");
        }
        // Lateral offsets ride along the flexion axis; dorsopalmar offsets along the deviation axis.
        if (joint.axis == JointAxis::flexion_y) {
          for (auto side : {CableSide::flexor, CableSide::extensor}) {
            const double centre = joint_cable_length(joint, a, {side, CableLateral::center});
            for (auto lat : {CableLateral::radial, CableLateral::ulnar}) {
              worst_invariance = std::max(worst_invariance, std::abs(joint_cable_length(joint, a, {side, lat}) - centre));
            }
          }
        } else {
          for (auto lat : {CableLateral::radial, CableLateral::ulnar}) {
            worst_invariance =
                std::max(worst_invariance, std::abs(joint_cable_length(joint, a, {CableSide::flexor, lat}) -
                                                    joint_cable_length(joint, a, {CableSide::extensor, lat})));
          }
        }
      }
    }
  }
  c.require(worst_invariance <= 1e-9, "offset invariance " + std::to_string(worst_invariance) + " mm");
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 10.0, "runtime " + num(elapsed, 2) + " s");
  c.note("worst paired deviation " + num(worst, 4) + " mm, invariance " + std::to_string(worst_invariance) + " mm, " +
         num(elapsed, 2) + " s");
  return c.outcome();
}

Outcome opposability() {
  Check c;
  const auto hand = default_hand();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = opposability_index(hand);
  const double elapsed = seconds_since(t0);
  const auto s = opposability_index(hand.scaled(2.0));
  const auto& v = r.shared_volume_cm3;
  c.require(r.index >= 0.12 && r.index <= 0.22, "J = " + num(r.index, 4) + " outside [0.12, 0.22]");
  c.require(v[0] > v[1] && v[1] > v[2] && v[2] > v[3], "shared volumes not strictly ordered");
  const double drift = std::abs(s.index - r.index) / r.index;
  c.require(drift <= 0.02, "x2 scaling changes J by " + num(100 * drift, 2) + "%");
  c.require(elapsed < 60.0, "runtime " + num(elapsed, 1) + " s");
  c.note("J " + num(r.index, 4) + " (x2: " + num(s.index, 4) + ", drift " + num(100 * drift, 2) + "%), v " + num(v[0], 1) +
         " > " + num(v[1], 1) + " > " + num(v[2], 1) + " > " + num(v[3], 1) + " cm3, " + num(elapsed, 1) + " s");
  return c.outcome();
}

Outcome motor_round_trip() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  const CouplingRule rule{};
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_angle = 0.0, worst_payout = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Pose p;
    for (Finger f : kAllFingers) {
      const auto& fm = hand.finger(f);
      for (int j = 0; j < 4; ++j) p[f][j] = fm.joints[j].rom_min + u(rng) * (fm.joints[j].rom_max - fm.joints[j].rom_min);
      const auto [lead, follow] = CouplingRule::coupled_joints(fm.kind);
      p[f][lead] = u(rng) * rule.leading_max(fm);
      p[f][follow] = rule.ratio * p[f][lead];
    }
    try {
      const auto m = pose_to_motor(hand, p, cfg, rule);
      const auto q = motor_to_pose(hand, m, cfg, rule);
      for (Finger f : kAllFingers)
        for (int j = 0; j < 4; ++j) worst_angle = std::max(worst_angle, deg2rad(std::abs(q[f][j] - p[f][j])));
      const auto m2 = pose_to_motor(hand, q, cfg, rule);
      for (std::size_t k = 0; k < m.angle.size(); ++k)
        worst_payout = std::max(worst_payout, std::abs(m2.payout(cfg, k) - m.payout(cfg, k)));
    } catch (const std::exception& e) {
      c.require(false, std::string("pose ") + std::to_string(i) + ": " + e.what());
    }
  }
  const double elapsed = seconds_since(t0);
  c.require(worst_angle <= 1e-6, "angle error " + std::to_string(worst_angle) + " rad");
  c.require(worst_payout <= 1e-6, "payout error " + std::to_string(worst_payout) + " mm");
  c.require(elapsed < 5.0, "runtime " + num(elapsed, 2) + " s");
  std::ostringstream os;
  os << "1000 poses, max angle error " << worst_angle << " rad, max payout error " << worst_payout << " mm, "
     << num(elapsed, 2) << " s";
  c.note(os.str());
  return c.outcome();
}

Outcome rmse_utility() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto hand = default_hand();
  const std::vector<Pose> poses{preset_pose("open"), preset_pose("power-sphere"), preset_pose("pinch")};
  const auto a = generate_trajectory(hand, poses, {{0.6, 0.4}, 100.0}, Interpolation::cosine);
  const auto b = generate_trajectory(hand, poses, {{0.6, 0.4}, 100.0}, Interpolation::linear);
  const RmseOptions opt{0.05, 5};
  const double same = trajectory_rmse(a, a, opt).aggregate;
  c.require(same == 0.0, "identical trajectories give " + std::to_string(same));
  // No shift search here: a time shift may trade against the offset while the hand moves.
  const auto shifted = transformed(a, RigidTransform::from_translation({0.0, 3.0, -4.0}));
  const double five = trajectory_rmse(a, shifted, {0.0, 5}).aggregate;
  c.require(std::abs(five - 5.0) <= 1e-9, "5 mm offset gives " + std::to_string(five));
  const auto x = RigidTransform::from_axis_angle({0.2, -1.0, 0.7}, 121.0, {12.0, -30.0, 5.0});
  const double base = trajectory_rmse(a, b, opt).aggregate;
  const double moved = trajectory_rmse(transformed(a, x), transformed(b, x), opt).aggregate;
  c.require(std::abs(base - moved) <= 1e-9, "rigid motion changes RMSE by " + std::to_string(std::abs(base - moved)));
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 1.0, "runtime " + num(elapsed, 3) + " s");
  c.note("identical 0, offset " + num(five, 9) + " mm, invariance " + std::to_string(std::abs(base - moved)) + " mm, " +
         num(elapsed, 3) + " s");
  return c.outcome();
}

Outcome cli_determinism(const fs::path& report_dir) {
  Check c;
  const std::string cli = RCJHAND_CLI_PATH;
  const std::vector<std::string> commands = {
      "describe",
      "fk --finger thumb --angles 5,30,30,20",
      "fk --finger little --angles 100,0,0,0 --clamp",
      "cable-sweep --finger thumb --joint 0 --step 1",
      "optimize-radius --kappa 12.7 --beta 50",
      "optimize-radius --gamma 9.5 --alpha 22.5",
      "optimize-radius --all-joints",
      "sweep",
      "workspace --finger index --steps 8 --voxel 3",
      "opposability --steps 6 --voxel 4",
      "simulate --presets open,tripod,close --durations 0.5,1 --rate 40 --interp cosine",
      "presets",
      "presets --name tripod",
  };
  std::map<std::string, std::string> first;
  for (int round = 0; round < 2; ++round) {
    const fs::path dir = report_dir / ("determinism_" + std::to_string(round));
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto invoke = [&](const std::string& args) {
      const std::string cmd = "\"" + cli + "\" --out \"" + dir.string() + "\" " + args + " > /dev/null 2>&1";
      c.require(std::system(cmd.c_str()) == 0, "'" + args + "' failed");
    };
    for (const auto& cmd : commands) invoke(cmd);
    const std::string traj = (dir / "trajectory.csv").string();
    invoke("rmse \"" + traj + "\" \"" + traj + "\" --window 0.1 --smooth 3");
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_text(e.path());
    if (round == 0) {
      first = files;
      continue;
    }
    c.require(files.size() == first.size(), "artifact sets differ");
    for (const auto& [name, text] : files) {
      const auto it = first.find(name);
      c.require(it != first.end() && it->second == text, name + " differs between runs");
    }
  }
  c.note(std::to_string(commands.size() + 1) + " invocations x 2, " + std::to_string(first.size()) +
         " artifacts byte-identical");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  fs::path report_dir = fs::temp_directory_path() / "rcjhand_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--report-dir") report_dir = argv[i + 1];
  }
  fs::create_directories(report_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"radius sweep residual", radius_sweep},
      {"radius recovery", [&] { return radius_recovery(report_dir); }},
      {"kinematic invariants", fk_invariants},
      {"antagonistic pairing", antagonistic_pairing},
      {"opposability", opposability},
      {"motor round trip", motor_round_trip},
      {"rmse utility", rmse_utility},
      {"cli determinism", [&] { return cli_determinism(report_dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
