#include "rcjhand/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcjhand/actuation.hpp"
#include "rcjhand/cable.hpp"
#include "rcjhand/config.hpp"
#include "rcjhand/csv.hpp"
#include "rcjhand/error.hpp"
#include "rcjhand/radius_opt.hpp"
#include "rcjhand/trajectory.hpp"
#include "rcjhand/workspace.hpp"

namespace rcjhand {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
};

struct Context {
  HandConfig cfg;
  std::string provenance;
  fs::path out;
};

Context open_context(const Common& common) {
  Context ctx;
  ctx.cfg = common.config_path.empty() ? default_config() : load_config(common.config_path);
  ctx.provenance = provenance_line(config_hash(ctx.cfg));
  if (!common.out_dir.empty()) {
    ctx.out = common.out_dir;
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    ctx.out = env;
  } else {
    ctx.out = ".";
  }
  return ctx;
}

Finger parse_finger(const std::string& name) {
  const auto f = finger_from_string(name);
  if (!f) throw CLI::ValidationError("--finger", "unknown finger '" + name + "'");
  return *f;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string fmt(double v, int digits = 6) { return format_number(v, digits); }

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---- subcommands ----

int cmd_describe(const Common& common, std::ostream& out) {
  const Context ctx = open_context(common);
  const fs::path path = ctx.out / "hand.yaml";
  write_text(path, "# " + ctx.provenance.substr(2) + "\n" + dump_config(ctx.cfg));
  const auto& hand = ctx.cfg.hand;
  for (Finger f : kAllFingers) {
    const auto& finger = hand.finger(f);
    out << to_string(f) << " (" << to_string(finger.kind) << ", length " << fmt(finger.total_length(), 1) << " mm)\n";
    for (int j = 0; j < 4; ++j) {
      const auto& jg = finger.joints[j];
      out << "  joint " << j << ' ' << (jg.axis == JointAxis::flexion_y ? "flexion  " : "deviation")
          << " r=" << fmt(jg.radius, 2) << " kappa=" << fmt(jg.flex_offset, 2)
          << " gamma=" << fmt(jg.lateral_spacing, 2) << " rom=[" << fmt(jg.rom_min, 1) << ", "
          << fmt(jg.rom_max, 1) << "] link=" << fmt(finger.links[j].length, 2) << "\n";
    }
  }
  out << "describe: d=" << fmt(hand.thumb_length, 2) << " mm, " << ctx.cfg.actuators.motors.size() << " motors, "
      << ctx.cfg.presets.size() << " presets -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_fk(const Common& common, const std::string& finger_name, const std::vector<double>& angles, bool clamp,
           std::ostream& out) {
  const Context ctx = open_context(common);
  const Finger f = parse_finger(finger_name);
  if (angles.size() != 4) throw CLI::ValidationError("--angles", "expected 4 comma-separated angles");
  const JointAngles q{angles[0], angles[1], angles[2], angles[3]};
  const auto& finger = ctx.cfg.hand.finger(f);
  const auto frames = finger_fk(finger, q, clamp ? RomCheck::clamp : RomCheck::strict);
  const RigidTransform& placement = ctx.cfg.hand.placement(f);
  json doc;
  doc["provenance"] = ctx.provenance;
  doc["finger"] = to_string(f);
  doc["angles_deg"] = angles;
  json fr = json::object();
  for (int i = 0; i < kFrameCount; ++i) {
    const auto& t = frames.frames[i];
    json m = json::array();
    for (int r = 0; r < 3; ++r) m.push_back(json::array({t.rotation()(r, 0), t.rotation()(r, 1), t.rotation()(r, 2)}));
    fr[std::string(to_string(static_cast<FrameId>(i)))] = {{"rotation", m}, {"translation_mm", vec_json(t.translation())}};
  }
  doc["frames"] = fr;
  const Eigen::Vector3d tip = frames.tip().translation();
  const Eigen::Vector3d tip_palm = placement * tip;
  doc["tip_mm"] = vec_json(tip);
  doc["tip_palm_mm"] = vec_json(tip_palm);
  const fs::path path = ctx.out / ("fk_" + std::string(to_string(f)) + ".json");
  write_json(path, doc);
  out << "fk " << to_string(f) << ": tip = (" << fmt(tip.x()) << ", " << fmt(tip.y()) << ", " << fmt(tip.z())
      << ") mm, palm = (" << fmt(tip_palm.x()) << ", " << fmt(tip_palm.y()) << ", " << fmt(tip_palm.z())
      << ") mm -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_cable_sweep(const Common& common, const std::string& finger_name, int joint, double step,
                    std::ostream& out) {
  const Context ctx = open_context(common);
  const Finger f = parse_finger(finger_name);
  if (joint < 0 || joint > 3) throw CLI::ValidationError("--joint", "joint index must be 0..3");
  if (!(step > 0.0)) throw CLI::ValidationError("--step", "step must be > 0");
  const auto& finger = ctx.cfg.hand.finger(f);
  const auto& plan = routing_plan(finger.kind);
  const auto& jg = finger.joints[joint];

  std::ostringstream csv;
  csv << ctx.provenance << "\nangle_deg";
  for (const auto& t : plan.tendons) csv << ',' << t.name << "_mm";
  for (const auto& p : plan.pairs) csv << ",pair_" << p.name << "_mm";
  csv << "\n";
  double worst = 0.0;
  const int n = static_cast<int>(std::floor((jg.rom_max - jg.rom_min) / step + 1e-9));
  for (int k = 0; k <= n + 1; ++k) {
    if (k == n + 1 && jg.rom_min + n * step >= jg.rom_max - 1e-12) break;
    const double a = k == n + 1 ? jg.rom_max : jg.rom_min + k * step;
    JointAngles q{0, 0, 0, 0};
    q[joint] = a;
    csv << fmt(a, 4);
    for (const auto& t : plan.tendons) csv << ',' << fmt(tendon_deviation(finger, q, t));
    for (const auto& p : plan.pairs) {
      const double d = paired_deviation(finger, q, p.name);
      worst = std::max(worst, std::abs(d));
      csv << ',' << fmt(d);
    }
    csv << "\n";
  }
  const fs::path path = ctx.out / ("cable_sweep_" + std::string(to_string(f)) + "_j" + std::to_string(joint) + ".csv");
  write_text(path, csv.str());
  out << "cable-sweep " << to_string(f) << " joint " << joint << ": max |paired deviation| = " << fmt(worst)
      << " mm -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_optimize_radius(const Common& common, std::optional<double> kappa, std::optional<double> beta,
                        std::optional<double> gamma, std::optional<double> alpha, bool all_joints,
                        std::ostream& out) {
  const Context ctx = open_context(common);
  if (all_joints) {
    std::ostringstream csv;
    csv << ctx.provenance << "\nfinger_kind,joint,moment_arm_mm,rom_min_deg,rom_max_deg,r_config_mm,r_opt_mm,"
                             "delta_mm,residual_mm\n";
    double worst = 0.0;
    for (Finger f : {Finger::thumb, Finger::index}) {
      const auto& finger = ctx.cfg.hand.finger(f);
      for (int j = 0; j < 4; ++j) {
        const auto& jg = finger.joints[j];
        const auto opt = optimize_radius(RadiusProblem::for_joint(jg));
        const double delta = opt.radius - jg.radius;
        worst = std::max(worst, std::abs(delta));
        csv << to_string(finger.kind) << ',' << j << ',' << fmt(jg.moment_arm(), 3) << ',' << fmt(jg.rom_min, 3)
            << ',' << fmt(jg.rom_max, 3) << ',' << fmt(jg.radius, 3) << ',' << fmt(opt.radius) << ','
            << fmt(delta) << ',' << fmt(opt.residual) << "\n";
      }
    }
    const fs::path path = ctx.out / "radius_report.csv";
    write_text(path, csv.str());
    out << "optimize-radius: 8 joints, max |r_opt - r_config| = " << fmt(worst) << " mm -> " << path.string() << "\n";
    return kExitOk;
  }
  RadiusProblem problem;
  if (kappa && beta && !gamma && !alpha) {
    problem = RadiusProblem::flexion(*kappa, *beta);
  } else if (gamma && alpha && !kappa && !beta) {
    problem = RadiusProblem::deviation(*gamma, *alpha);
  } else {
    throw CLI::ValidationError("optimize-radius", "give --kappa and --beta, --gamma and --alpha, or --all-joints");
  }
  const auto opt = optimize_radius(problem);
  json doc;
  doc["provenance"] = ctx.provenance;
  doc["axis"] = problem.axis == JointAxis::flexion_y ? "flexion" : "deviation";
  doc["moment_arm_mm"] = problem.moment_arm;
  doc["rom_deg"] = json::array({problem.rom_min, problem.rom_max});
  doc["r_opt_mm"] = opt.radius;
  doc["residual_mm"] = opt.residual;
  doc["used_fallback"] = opt.used_fallback;
  const fs::path path = ctx.out / "optimize_radius.json";
  write_json(path, doc);
  out << "optimize-radius: r* = " << fmt(opt.radius) << " mm, residual = " << fmt(opt.residual) << " mm -> "
      << path.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const Common& common, const std::vector<double>& kappas, const std::vector<double>& betas,
              std::ostream& out) {
  const Context ctx = open_context(common);
  const auto result = sweep(kappas, betas);
  double worst = 0.0;
  std::size_t failed = 0;
  for (const auto& c : result.cells) {
    if (c.optimum) worst = std::max(worst, c.optimum->residual);
    else ++failed;
  }
  const fs::path path = ctx.out / "sweep.csv";
  write_text(path, sweep_csv(result, ctx.provenance));
  out << "sweep: " << result.cells.size() << " cells, " << failed << " failed, max residual = " << fmt(worst)
      << " mm -> " << path.string() << "\n";
  return kExitOk;
}

SamplerSpec sampler(int steps, double voxel) {
  if (steps < 1) throw CLI::ValidationError("--steps", "steps must be >= 1");
  if (!(voxel > 0.0)) throw CLI::ValidationError("--voxel", "voxel edge must be > 0");
  return SamplerSpec::with_steps(steps, voxel);
}

int cmd_workspace(const Common& common, const std::string& finger_name, int steps, double voxel, std::ostream& out) {
  const Context ctx = open_context(common);
  const Finger f = parse_finger(finger_name);
  const VoxelGrid grid = sample_workspace(ctx.cfg.hand, f, sampler(steps, voxel));
  const fs::path path = ctx.out / ("workspace_" + std::string(to_string(f)) + ".csv");
  write_text(path, workspace_csv(grid, ctx.provenance));
  out << "workspace " << to_string(f) << ": " << grid.count() << " voxels, " << fmt(grid.volume_cm3(), 3)
      << " cm^3 -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_opposability(const Common& common, int steps, double voxel, const std::vector<double>& weights,
                     std::ostream& out) {
  const Context ctx = open_context(common);
  if (weights.size() != 4) throw CLI::ValidationError("--weights", "expected 4 comma-separated weights");
  const std::array<double, 4> w{weights[0], weights[1], weights[2], weights[3]};
  const auto report = opposability_index(ctx.cfg.hand, w, sampler(steps, voxel));
  json doc;
  doc["provenance"] = ctx.provenance;
  doc["thumb_length_mm"] = report.thumb_length;
  doc["weights"] = weights;
  json shared = json::object(), ws = json::object();
  for (int i = 0; i < 4; ++i) shared[std::string(to_string(kOpposedFingers[i]))] = report.shared_volume_cm3[i];
  for (Finger f : kAllFingers) ws[std::string(to_string(f))] = report.workspace_volume_cm3[static_cast<int>(f)];
  doc["shared_volume_cm3"] = shared;
  doc["workspace_volume_cm3"] = ws;
  doc["opposability_index"] = report.index;
  const fs::path path = ctx.out / "opposability.json";
  write_json(path, doc);
  out << "opposability: J = " << fmt(report.index, 4) << " (v = " << fmt(report.shared_volume_cm3[0], 1) << ", "
      << fmt(report.shared_volume_cm3[1], 1) << ", " << fmt(report.shared_volume_cm3[2], 1) << ", "
      << fmt(report.shared_volume_cm3[3], 1) << " cm^3) -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_simulate(const Common& common, const std::vector<std::string>& names, const std::vector<double>& durations,
                 double rate, const std::string& interp, std::ostream& out) {
  const Context ctx = open_context(common);
  std::vector<Pose> poses;
  for (const auto& n : names) poses.push_back(preset_pose(ctx.cfg.presets, n));
  TrajectoryTiming timing;
  timing.rate_hz = rate;
  timing.durations = durations;
  if (durations.size() == 1 && poses.size() > 2) timing.durations.assign(poses.size() - 1, durations[0]);
  Interpolation mode;
  if (interp == "linear") mode = Interpolation::linear;
  else if (interp == "cosine") mode = Interpolation::cosine;
  else throw CLI::ValidationError("--interp", "expected linear or cosine");
  const Trajectory traj = generate_trajectory(ctx.cfg.hand, poses, timing, mode);

  std::ostringstream motors;
  motors << ctx.provenance << "\nt_s,finger,pair,psi_rad,payout_mm\n";
  for (const auto& s : traj.samples) {
    const MotorState m = pose_to_motor(ctx.cfg.hand, s.pose, ctx.cfg.actuators, ctx.cfg.coupling);
    for (std::size_t i = 0; i < m.angle.size(); ++i) {
      const auto& motor = ctx.cfg.actuators.motors[i];
      motors << fmt(s.t) << ',' << to_string(motor.finger) << ',' << motor.pair << ',' << fmt(m.angle[i], 9) << ','
             << fmt(m.payout(ctx.cfg.actuators, i)) << "\n";
    }
  }
  const fs::path traj_path = ctx.out / "trajectory.csv";
  const fs::path motor_path = ctx.out / "motors.csv";
  write_text(traj_path, trajectory_csv(traj, ctx.provenance));
  write_text(motor_path, motors.str());
  out << "simulate: " << traj.size() << " samples over " << fmt(traj.samples.back().t, 3) << " s -> "
      << traj_path.string() << ", " << motor_path.string() << "\n";
  return kExitOk;
}

int cmd_rmse(const Common& common, const std::string& a, const std::string& b, double window, int smooth,
             std::ostream& out) {
  const Context ctx = open_context(common);
  const Trajectory ta = read_trajectory_csv(a);
  const Trajectory tb = read_trajectory_csv(b);
  const RmseResult r = trajectory_rmse(ta, tb, {window, smooth});
  json doc;
  doc["provenance"] = ctx.provenance;
  json per = json::object();
  for (Finger f : kAllFingers) per[std::string(to_string(f))] = r.per_finger[static_cast<int>(f)];
  doc["rmse_mm"] = per;
  doc["aggregate_mm"] = r.aggregate;
  doc["shift_s"] = r.shift_s;
  const fs::path path = ctx.out / "rmse.json";
  write_json(path, doc);
  out << "rmse: aggregate = " << fmt(r.aggregate) << " mm, shift = " << fmt(r.shift_s) << " s -> " << path.string()
      << "\n";
  return kExitOk;
}

int cmd_presets(const Common& common, const std::string& name, std::ostream& out) {
  const Context ctx = open_context(common);
  std::ostringstream csv;
  csv << ctx.provenance << "\npreset,finger,phi0_deg,theta1_deg,theta2_deg,theta3_deg\n";
  std::vector<std::string> names;
  if (!name.empty()) {
    preset_pose(ctx.cfg.presets, name);
    names.push_back(name);
  } else {
    for (const auto& [n, pose] : ctx.cfg.presets) names.push_back(n);
  }
  for (const auto& n : names) {
    const Pose& pose = ctx.cfg.presets.find(n)->second;
    for (Finger f : kAllFingers) {
      csv << n << ',' << to_string(f);
      for (double a : pose[f]) csv << ',' << fmt(a, 3);
      csv << "\n";
    }
    if (!name.empty()) {
      for (Finger f : kAllFingers) {
        const auto& q = pose[f];
        out << "  " << to_string(f) << ": " << fmt(q[0], 1) << ' ' << fmt(q[1], 1) << ' ' << fmt(q[2], 1) << ' '
            << fmt(q[3], 1) << "\n";
      }
    }
  }
  const fs::path path = ctx.out / "presets.csv";
  write_text(path, csv.str());
  out << "presets: " << names.size() << " pose(s) -> " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rolling-contact tendon hand model: kinematics, cable routing, radius design, workspace, actuation"};
  app.name(argv.empty() ? "rcjhand" : fs::path(argv[0]).filename().string());
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "hand configuration YAML (default: built-in shipped model)");
  app.add_option("--out", common.out_dir, std::string("output directory (default: $") + kOutDirEnv + " or .)");

  std::function<int()> action;

  auto* describe = app.add_subcommand("describe", "print the hand model and write it as YAML");
  describe->callback([&] { action = [&] { return cmd_describe(common, out); }; });

  std::string finger = "index";
  std::vector<double> angles;
  bool clamp = false;
  auto* fk = app.add_subcommand("fk", "forward kinematics of one finger");
  fk->add_option("--finger", finger, "thumb|index|middle|ring|little")->capture_default_str();
  fk->add_option("--angles", angles, "phi0,theta1,theta2,theta3 in degrees")->delimiter(',')->required();
  fk->add_flag("--clamp", clamp, "saturate angles at the ROM instead of rejecting them");
  fk->callback([&] { action = [&] { return cmd_fk(common, finger, angles, clamp, out); }; });

  int joint = 1;
  double step = 0.5;
  auto* cable = app.add_subcommand("cable-sweep", "tendon deviations while one joint sweeps its ROM");
  cable->add_option("--finger", finger, "thumb|index|middle|ring|little")->capture_default_str();
  cable->add_option("--joint", joint, "joint index 0..3")->capture_default_str();
  cable->add_option("--step", step, "angle step [deg]")->capture_default_str();
  cable->callback([&] { action = [&] { return cmd_cable_sweep(common, finger, joint, step, out); }; });

  std::optional<double> kappa, beta, gamma, alpha;
  bool all_joints = false;
  auto* opt = app.add_subcommand("optimize-radius", "optimal rolling radius for one joint");
  opt->add_option("--kappa", kappa, "flexion moment arm [mm]");
  opt->add_option("--beta", beta, "flexion surface angle [deg]");
  opt->add_option("--gamma", gamma, "deviation moment arm [mm]");
  opt->add_option("--alpha", alpha, "deviation surface angle [deg]");
  opt->add_flag("--all-joints", all_joints, "optimize every joint of the configured thumb and finger");
  opt->callback([&] {
    action = [&] { return cmd_optimize_radius(common, kappa, beta, gamma, alpha, all_joints, out); };
  });

  std::vector<double> kappas{6, 7, 8, 9, 10, 11, 12, 13}, betas{30, 40, 50, 60};
  auto* sw = app.add_subcommand("sweep", "radius optimization over a kappa x beta grid");
  sw->add_option("--kappas", kappas, "comma-separated kappa values [mm]")->delimiter(',');
  sw->add_option("--betas", betas, "comma-separated beta values [deg]")->delimiter(',');
  sw->callback([&] { action = [&] { return cmd_sweep(common, kappas, betas, out); }; });

  int steps = 15;
  double voxel = 2.0;
  auto* ws = app.add_subcommand("workspace", "voxelized reachable workspace of one finger");
  ws->add_option("--finger", finger, "thumb|index|middle|ring|little")->capture_default_str();
  ws->add_option("--steps", steps, "grid steps per joint")->capture_default_str();
  ws->add_option("--voxel", voxel, "voxel edge [mm]")->capture_default_str();
  ws->callback([&] { action = [&] { return cmd_workspace(common, finger, steps, voxel, out); }; });

  std::vector<double> weights{1, 1, 1, 1};
  auto* opp = app.add_subcommand("opposability", "shared workspaces and the thumb opposability index");
  opp->add_option("--steps", steps, "grid steps per joint")->capture_default_str();
  opp->add_option("--voxel", voxel, "voxel edge [mm]")->capture_default_str();
  opp->add_option("--weights", weights, "index,middle,ring,little weights")->delimiter(',');
  opp->callback([&] { action = [&] { return cmd_opposability(common, steps, voxel, weights, out); }; });

  std::vector<std::string> names{"open", "close"};
  std::vector<double> durations{1.0};
  double rate = 100.0;
  std::string interp = "linear";
  auto* sim = app.add_subcommand("simulate", "trajectory through preset poses plus motor commands");
  sim->add_option("--presets", names, "comma-separated preset names")->delimiter(',');
  sim->add_option("--durations", durations, "segment durations [s] (one value applies to all)")->delimiter(',');
  sim->add_option("--rate", rate, "sample rate [Hz]")->capture_default_str();
  sim->add_option("--interp", interp, "linear|cosine")->capture_default_str();
  sim->callback([&] { action = [&] { return cmd_simulate(common, names, durations, rate, interp, out); }; });

  std::string file_a, file_b;
  double window = 0.0;
  int smooth = 1;
  auto* rm = app.add_subcommand("rmse", "fingertip RMSE between two trajectory CSV files");
  rm->add_option("a", file_a, "first trajectory CSV")->required();
  rm->add_option("b", file_b, "second trajectory CSV")->required();
  rm->add_option("--window", window, "time-shift search half width [s]")->capture_default_str();
  rm->add_option("--smooth", smooth, "moving-average width in samples (odd)")->capture_default_str();
  rm->callback([&] { action = [&] { return cmd_rmse(common, file_a, file_b, window, smooth, out); }; });

  std::string preset_name;
  auto* pr = app.add_subcommand("presets", "list or show grasp presets");
  pr->add_option("--name", preset_name, "show a single preset");
  pr->callback([&] { action = [&] { return cmd_presets(common, preset_name, out); }; });

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace rcjhand
