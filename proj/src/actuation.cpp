#include "rcjhand/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rcjhand/error.hpp"

namespace rcjhand {

namespace {

struct FingerMotors {
  int base_a = -1;
  int base_b = -1;
  int distal = -1;
};

FingerMotors motors_of(const ActuatorConfig& cfg, Finger finger) {
  const auto& plan = routing_plan(finger == Finger::thumb ? FingerKind::thumb : FingerKind::finger);
  FingerMotors out;
  for (std::size_t i = 0; i < cfg.motors.size(); ++i) {
    const auto& m = cfg.motors[i];
    if (m.finger != finger) continue;
    if (m.pair == plan.pairs[0].name) out.base_a = static_cast<int>(i);
    else if (m.pair == plan.pairs[1].name) out.base_b = static_cast<int>(i);
    else if (m.pair == plan.pairs[2].name) out.distal = static_cast<int>(i);
  }
  return out;
}

// Flexor-member deviation of a pair, with zero-pose lengths cached.
class PairLength {
 public:
  PairLength(const FingerModel& finger, const TendonPair& pair)
      : finger_(finger), tendon_(routing_plan(finger.kind).tendon(pair.flexor)) {
    zero_ = tendon_length(finger_, {0, 0, 0, 0}, tendon_, RomCheck::none);
  }
  double operator()(const JointAngles& q) const { return tendon_length(finger_, q, tendon_, RomCheck::none) - zero_; }

 private:
  const FingerModel& finger_;
  const Tendon& tendon_;
  double zero_ = 0.0;
};

JointAngles with_coupling(FingerKind kind, const CouplingRule& rule, double phi0, double lead_base, double lead_distal) {
  JointAngles q{phi0, lead_base, 0.0, 0.0};
  if (kind == FingerKind::thumb) {
    q[2] = rule.ratio * lead_base;
    q[3] = lead_distal;
  } else {
    q[2] = lead_distal;
    q[3] = rule.ratio * lead_distal;
  }
  return q;
}

struct Range {
  double lo;
  double hi;
};

[[noreturn]] void unreachable(Finger f, const std::string& what) {
  throw Error(ErrorCode::unreachable_payout, std::string(to_string(f)) + ": " + what);
}

}  // namespace

ActuatorConfig ActuatorConfig::uniform(double bobbin_radius) {
  ActuatorConfig cfg;
  for (Finger f : kAllFingers) {
    const auto& plan = routing_plan(f == Finger::thumb ? FingerKind::thumb : FingerKind::finger);
    for (const auto& p : plan.pairs) cfg.motors.push_back({f, p.name, bobbin_radius, +1});
  }
  return cfg;
}

void validate(const ActuatorConfig& cfg) {
  std::set<std::pair<int, std::string>> seen;
  for (const auto& m : cfg.motors) {
    const std::string who = std::string(to_string(m.finger)) + "/" + m.pair;
    if (!(m.bobbin_radius > 0.0)) throw Error(ErrorCode::validation_error, who + ": bobbin radius b > 0 violated");
    if (m.direction != 1 && m.direction != -1) {
      throw Error(ErrorCode::validation_error, who + ": winding direction must be +1 or -1");
    }
    routing_plan(m.finger == Finger::thumb ? FingerKind::thumb : FingerKind::finger).pair(m.pair);
    if (!seen.emplace(static_cast<int>(m.finger), m.pair).second) {
      throw Error(ErrorCode::validation_error, who + ": pair assigned to more than one motor");
    }
  }
  for (Finger f : kAllFingers) {
    for (const auto& p : routing_plan(f == Finger::thumb ? FingerKind::thumb : FingerKind::finger).pairs) {
      if (!seen.count({static_cast<int>(f), p.name})) {
        throw Error(ErrorCode::validation_error, std::string(to_string(f)) + "/" + p.name + ": pair has no motor");
      }
    }
  }
}

std::array<int, 2> CouplingRule::coupled_joints(FingerKind kind) {
  return kind == FingerKind::thumb ? std::array<int, 2>{1, 2} : std::array<int, 2>{2, 3};
}

bool CouplingRule::satisfied(FingerKind kind, const JointAngles& angles, double tol_deg) const {
  const auto [lead, follow] = coupled_joints(kind);
  return std::abs(angles[follow] - ratio * angles[lead]) <= tol_deg;
}

double CouplingRule::leading_max(const FingerModel& finger) const {
  const auto [lead, follow] = coupled_joints(finger.kind);
  return std::min(finger.joints[lead].rom_max, finger.joints[follow].rom_max / ratio);
}

double MotorState::payout(const ActuatorConfig& cfg, std::size_t i) const {
  return cfg.motors.at(i).bobbin_radius * angle.at(i);
}

MotorState pose_to_motor(const HandModel& hand, const Pose& pose, const ActuatorConfig& cfg,
                         const CouplingRule& coupling) {
  if (!(coupling.ratio > 0.0)) throw Error(ErrorCode::validation_error, "coupling ratio must be > 0");
  for (Finger f : kAllFingers) {
    const auto& finger = hand.finger(f);
    validate_rom(finger, pose[f], RomCheck::strict);
    if (!coupling.satisfied(finger.kind, pose[f])) {
      const auto [lead, follow] = CouplingRule::coupled_joints(finger.kind);
      std::ostringstream os;
      os << to_string(f) << ": joint " << follow << " = " << pose[f][follow] << " deg but coupling requires "
         << coupling.ratio * pose[f][lead] << " deg";
      throw Error(ErrorCode::coupling_violation, os.str());
    }
  }
  MotorState state;
  for (const auto& m : cfg.motors) {
    const auto& finger = hand.finger(m.finger);
    const auto& plan = routing_plan(finger.kind);
    const double dev = tendon_deviation(finger, pose[m.finger], plan.tendon(plan.pair(m.pair).flexor), RomCheck::none);
    state.angle.push_back(m.direction * dev / m.bobbin_radius);
  }
  return state;
}

Pose motor_to_pose(const HandModel& hand, const MotorState& motors, const ActuatorConfig& cfg,
                   const CouplingRule& coupling, const InverseOptions& options) {
  validate(cfg);
  if (motors.angle.size() != cfg.motors.size()) {
    throw Error(ErrorCode::validation_error, "motor state size does not match actuator config");
  }
  if (!(coupling.ratio > 0.0)) throw Error(ErrorCode::validation_error, "coupling ratio must be > 0");
  auto target = [&](int i) {
    const auto& m = cfg.motors[i];
    return m.direction * m.bobbin_radius * motors.angle[i];
  };

  Pose pose;
  for (Finger f : kAllFingers) {
    const auto& finger = hand.finger(f);
    const auto& plan = routing_plan(finger.kind);
    const FingerMotors ids = motors_of(cfg, f);
    const PairLength len_a(finger, plan.pairs[0]);
    const PairLength len_b(finger, plan.pairs[1]);
    const PairLength len_d(finger, plan.pairs[2]);
    const Range phi{finger.joints[0].rom_min, finger.joints[0].rom_max};
    const Range base{finger.joints[1].rom_min,
                     finger.kind == FingerKind::thumb ? coupling.leading_max(finger) : finger.joints[1].rom_max};
    const Range distal{finger.kind == FingerKind::thumb ? finger.joints[3].rom_min : finger.joints[2].rom_min,
                       finger.kind == FingerKind::thumb ? finger.joints[3].rom_max : coupling.leading_max(finger)};

    // Distal group: one monotone equation in the leading angle.
    const double td = target(ids.distal);
    auto fd = [&](double x) { return len_d(with_coupling(finger.kind, coupling, 0.0, 0.0, x)) - td; };
    double lo = distal.lo, hi = distal.hi;
    double flo = fd(lo), fhi = fd(hi);
    if (flo * fhi > 0.0 && std::min(std::abs(flo), std::abs(fhi)) > options.tolerance_mm) {
      std::ostringstream os;
      os << "distal payout " << td << " mm outside reachable range [" << std::min(flo, fhi) + td << ", "
         << std::max(flo, fhi) + td << "]";
      unreachable(f, os.str());
    }
    double xd = std::abs(flo) < std::abs(fhi) ? lo : hi;
    for (int it = 0; it < options.max_iterations && std::abs(fd(xd)) > options.tolerance_mm; ++it) {
      // Secant step inside the bracket, bisection when it leaves.
      double x = hi - fhi * (hi - lo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double fx = fd(x);
      if ((fx < 0.0) == (flo < 0.0)) {
        lo = x;
        flo = fx;
      } else {
        hi = x;
        fhi = fx;
      }
      xd = x;
      if (hi - lo < 1e-15) break;
    }
    if (std::abs(fd(xd)) > options.tolerance_mm) {
      std::ostringstream os;
      os << to_string(f) << ": distal solve did not converge (residual " << std::abs(fd(xd)) << " mm)";
      throw Error(ErrorCode::no_convergence, os.str());
    }

    // Base group: two equations in (phi0, leading base flexion).
    const double ta = target(ids.base_a), tb = target(ids.base_b);
    auto residual = [&](double p, double t) {
      const JointAngles q = with_coupling(finger.kind, coupling, p, t, 0.0);
      return Eigen::Vector2d(len_a(q) - ta, len_b(q) - tb);
    };
    Eigen::Vector2d x(0.5 * (phi.lo + phi.hi), 0.5 * (base.lo + base.hi));
    Eigen::Vector2d r = residual(x[0], x[1]);
    const double h = 1e-6;
    int it = 0;
    for (; it < options.max_iterations && r.lpNorm<Eigen::Infinity>() > options.tolerance_mm; ++it) {
      Eigen::Matrix2d jac;
      for (int k = 0; k < 2; ++k) {
        const Range rg = k == 0 ? phi : base;
        Eigen::Vector2d xp = x, xm = x;
        // One-sided differences at the ROM boundaries.
        xp[k] = std::min(x[k] + h, rg.hi);
        xm[k] = std::max(x[k] - h, rg.lo);
        jac.col(k) = (residual(xp[0], xp[1]) - residual(xm[0], xm[1])) / (xp[k] - xm[k]);
      }
      const Eigen::Vector2d step = jac.partialPivLu().solve(-r);
      double damping = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls, damping *= 0.5) {
        Eigen::Vector2d cand = x + damping * step;
        cand[0] = std::clamp(cand[0], phi.lo, phi.hi);
        cand[1] = std::clamp(cand[1], base.lo, base.hi);
        const Eigen::Vector2d rc = residual(cand[0], cand[1]);
        if (rc.norm() < r.norm()) {
          x = cand;
          r = rc;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (r.lpNorm<Eigen::Infinity>() > options.tolerance_mm) {
      const bool on_edge = x[0] <= phi.lo || x[0] >= phi.hi || x[1] <= base.lo || x[1] >= base.hi;
      std::ostringstream os;
      if (on_edge) {
        os << "base payouts (" << ta << ", " << tb << ") mm are not reachable (residual "
           << r.lpNorm<Eigen::Infinity>() << " mm at the ROM boundary)";
        unreachable(f, os.str());
      }
      os << to_string(f) << ": base solve did not converge after " << it << " iterations (residual "
         << r.lpNorm<Eigen::Infinity>() << " mm)";
      throw Error(ErrorCode::no_convergence, os.str());
    }
    pose[f] = with_coupling(finger.kind, coupling, x[0], x[1], xd);
  }
  return pose;
}

namespace {

JointAngles F(double phi0, double pip_base, double pip) { return {phi0, pip_base, pip, pip}; }
JointAngles T(double phi0, double cmc, double ip) { return {phi0, cmc, cmc, ip}; }

Pose hand_pose(const JointAngles& thumb, const JointAngles& index, const JointAngles& middle, const JointAngles& ring,
               const JointAngles& little) {
  Pose p;
  p.angles = {thumb, index, middle, ring, little};
  return p;
}

// Positive phi0 deviates ulnarly; spread fans the fingers out, converge closes them in.
PresetCatalog make_presets() {
  PresetCatalog c;
  c["open"] = Pose{};
  c["close"] = hand_pose(T(20, 60, 60), F(0, 90, 90), F(0, 90, 90), F(0, 90, 90), F(0, 90, 90));
  c["pinch"] = hand_pose(T(30, 45, 30), F(5, 45, 40), F(0, 20, 20), F(0, 20, 20), F(0, 20, 20));
  c["large-heavy-wrap"] = hand_pose(T(25, 30, 20), F(0, 40, 35), F(0, 40, 35), F(0, 40, 35), F(0, 40, 35));
  c["small-heavy-wrap"] = hand_pose(T(30, 50, 40), F(0, 80, 70), F(0, 80, 70), F(0, 80, 70), F(0, 80, 70));
  c["medium-wrap"] = hand_pose(T(25, 40, 30), F(0, 60, 50), F(0, 60, 50), F(0, 60, 50), F(0, 60, 50));
  c["adducted-thumb"] = hand_pose(T(-10, 10, 10), F(0, 70, 60), F(0, 70, 60), F(0, 70, 60), F(0, 70, 60));
  c["light-tool"] = hand_pose(T(20, 40, 40), F(0, 60, 40), F(0, 70, 60), F(0, 75, 65), F(0, 80, 70));
  c["thumb-4-fingers"] = hand_pose(T(35, 40, 30), F(5, 35, 30), F(0, 35, 30), F(-5, 35, 30), F(-10, 35, 30));
  c["thumb-3-fingers"] = hand_pose(T(35, 45, 30), F(5, 40, 30), F(0, 40, 30), F(-5, 40, 30), F(0, 80, 80));
  c["thumb-2-fingers"] = hand_pose(T(35, 50, 30), F(5, 45, 35), F(0, 45, 35), F(0, 85, 80), F(0, 85, 80));
  c["thumb-index-finger"] = hand_pose(T(30, 50, 35), F(0, 45, 40), F(0, 85, 80), F(0, 85, 80), F(0, 85, 80));
  c["power-disk"] = hand_pose(T(40, 25, 15), F(-10, 30, 25), F(0, 30, 25), F(10, 30, 25), F(20, 30, 25));
  c["power-sphere"] = hand_pose(T(40, 40, 30), F(-10, 50, 40), F(0, 50, 40), F(10, 50, 40), F(20, 50, 40));
  c["precision-disk"] = hand_pose(T(40, 30, 20), F(-10, 25, 20), F(0, 25, 20), F(10, 25, 20), F(20, 25, 20));
  c["precision-sphere"] = hand_pose(T(35, 35, 25), F(-10, 30, 25), F(0, 30, 25), F(10, 30, 25), F(15, 30, 25));
  c["tripod"] = hand_pose(T(30, 45, 30), F(5, 45, 35), F(-5, 45, 35), F(0, 70, 70), F(0, 70, 70));
  c["platform-push"] = hand_pose(T(-10, 0, 0), F(0, 10, 0), F(0, 10, 0), F(0, 10, 0), F(0, 10, 0));
  c["lateral-pinch"] = hand_pose(T(-20, 20, 20), F(0, 60, 50), F(0, 80, 80), F(0, 80, 80), F(0, 80, 80));
  return c;
}

}  // namespace

const PresetCatalog& default_presets() {
  static const PresetCatalog catalog = make_presets();
  return catalog;
}

Pose preset_pose(const PresetCatalog& catalog, std::string_view name) {
  const auto it = catalog.find(name);
  if (it == catalog.end()) throw Error(ErrorCode::unknown_preset, "unknown preset '" + std::string(name) + "'");
  return it->second;
}

}  // namespace rcjhand
