#include "rcjhand/config.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rcjhand/error.hpp"

namespace rcjhand {

namespace {

// ---- parsing ----

std::string where(const YAML::Node& node, const std::string& key) {
  std::ostringstream os;
  os << "line " << node.Mark().line + 1 << ", key '" << key << "'";
  return os.str();
}

[[noreturn]] void parse_fail(const YAML::Node& node, const std::string& key, const std::string& what) {
  throw Error(ErrorCode::parse_error, where(node, key) + ": " + what);
}

void require_map(const YAML::Node& node, const std::string& key, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) parse_fail(node, key, "expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    if (!ok.count(name)) parse_fail(kv.first, key + "." + name, "unknown key");
  }
}

YAML::Node child(const YAML::Node& node, const std::string& key, const std::string& path) {
  const YAML::Node c = node[key];
  if (!c) parse_fail(node, path + "." + key, "missing key");
  return c;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key, const std::string& path) {
  const YAML::Node c = child(node, key, path);
  try {
    return c.as<T>();
  } catch (const YAML::Exception&) {
    parse_fail(c, path + "." + key, "wrong value type");
  }
}

template <std::size_t N>
std::array<double, N> numbers(const YAML::Node& node, const std::string& key, const std::string& path) {
  const YAML::Node c = child(node, key, path);
  if (!c.IsSequence() || c.size() != N) {
    parse_fail(c, path + "." + key, "expected a list of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    try {
      out[i] = c[i].as<double>();
    } catch (const YAML::Exception&) {
      parse_fail(c[i], path + "." + key, "wrong value type");
    }
  }
  return out;
}

JointGeometry parse_joint(const YAML::Node& n, const std::string& path) {
  const auto axis = scalar<std::string>(n, "axis", path);
  JointGeometry j;
  if (axis == "flexion") {
    require_map(n, path, {"axis", "r_mm", "kappa_mm", "gamma_mm", "beta_deg", "rom_deg"});
    j.axis = JointAxis::flexion_y;
    j.surface_angle = scalar<double>(n, "beta_deg", path);
  } else if (axis == "deviation") {
    require_map(n, path, {"axis", "r_mm", "kappa_mm", "gamma_mm", "alpha_deg", "rom_deg"});
    j.axis = JointAxis::deviation_x;
    j.surface_angle = scalar<double>(n, "alpha_deg", path);
  } else {
    parse_fail(n["axis"], path + ".axis", "expected 'flexion' or 'deviation'");
  }
  j.radius = scalar<double>(n, "r_mm", path);
  j.flex_offset = scalar<double>(n, "kappa_mm", path);
  j.lateral_spacing = scalar<double>(n, "gamma_mm", path);
  const auto rom = numbers<2>(n, "rom_deg", path);
  j.rom_min = rom[0];
  j.rom_max = rom[1];
  return j;
}

LinkGeometry parse_link(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"length_mm", "G_mm", "K_mm"});
  LinkGeometry l;
  l.length = scalar<double>(n, "length_mm", path);
  if (n["G_mm"]) l.width_g = scalar<double>(n, "G_mm", path);
  if (n["K_mm"]) l.width_k = scalar<double>(n, "K_mm", path);
  return l;
}

RigidTransform parse_placement(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"translation_mm", "axis", "angle_deg"});
  const auto t = numbers<3>(n, "translation_mm", path);
  const auto a = numbers<3>(n, "axis", path);
  const Eigen::Vector3d axis(a[0], a[1], a[2]);
  if (!(axis.norm() > 0.0)) parse_fail(n["axis"], path + ".axis", "rotation axis must be non-zero");
  return RigidTransform::from_axis_angle(axis, scalar<double>(n, "angle_deg", path), {t[0], t[1], t[2]});
}

FingerModel parse_finger(const YAML::Node& n, const std::string& path, RigidTransform& placement) {
  require_map(n, path, {"kind", "joints", "links", "placement"});
  FingerModel f;
  const auto kind = scalar<std::string>(n, "kind", path);
  if (kind == "thumb") f.kind = FingerKind::thumb;
  else if (kind == "finger") f.kind = FingerKind::finger;
  else parse_fail(n["kind"], path + ".kind", "expected 'thumb' or 'finger'");
  const YAML::Node joints = child(n, "joints", path);
  const YAML::Node links = child(n, "links", path);
  if (!joints.IsSequence() || joints.size() != 4) parse_fail(joints, path + ".joints", "expected 4 joints");
  if (!links.IsSequence() || links.size() != 4) parse_fail(links, path + ".links", "expected 4 links");
  for (std::size_t i = 0; i < 4; ++i) {
    f.joints[i] = parse_joint(joints[i], path + ".joints[" + std::to_string(i) + "]");
    f.links[i] = parse_link(links[i], path + ".links[" + std::to_string(i) + "]");
  }
  placement = parse_placement(child(n, "placement", path), path + ".placement");
  return f;
}

Pose parse_pose(const YAML::Node& n, const std::string& path) {
  require_map(n, path, {"thumb", "index", "middle", "ring", "little"});
  Pose p;
  for (Finger f : kAllFingers) p[f] = numbers<4>(n, std::string(to_string(f)), path);
  return p;
}

HandConfig parse_document(const YAML::Node& root) {
  require_map(root, "<root>", {"version", "thumb_length_mm", "fingers", "actuation", "presets"});
  const int version = scalar<int>(root, "version", "<root>");
  if (version != kConfigVersion) parse_fail(root["version"], "version", "unsupported version " + std::to_string(version));

  HandConfig cfg;
  const YAML::Node fingers = child(root, "fingers", "<root>");
  require_map(fingers, "fingers", {"thumb", "index", "middle", "ring", "little"});
  for (Finger f : kAllFingers) {
    const std::string name(to_string(f));
    cfg.hand.finger(f) = parse_finger(child(fingers, name, "fingers"), "fingers." + name, cfg.hand.placement(f));
  }
  cfg.hand.thumb_length = scalar<double>(root, "thumb_length_mm", "<root>");

  const YAML::Node act = child(root, "actuation", "<root>");
  require_map(act, "actuation", {"coupling_ratio", "motors"});
  cfg.coupling.ratio = scalar<double>(act, "coupling_ratio", "actuation");
  const YAML::Node motors = child(act, "motors", "actuation");
  if (!motors.IsSequence()) parse_fail(motors, "actuation.motors", "expected a list");
  for (std::size_t i = 0; i < motors.size(); ++i) {
    const std::string path = "actuation.motors[" + std::to_string(i) + "]";
    const YAML::Node m = motors[i];
    require_map(m, path, {"finger", "pair", "bobbin_radius_mm", "direction"});
    Motor motor;
    const auto finger = finger_from_string(scalar<std::string>(m, "finger", path));
    if (!finger) parse_fail(m["finger"], path + ".finger", "unknown finger");
    motor.finger = *finger;
    motor.pair = scalar<std::string>(m, "pair", path);
    motor.bobbin_radius = scalar<double>(m, "bobbin_radius_mm", path);
    motor.direction = scalar<int>(m, "direction", path);
    cfg.actuators.motors.push_back(motor);
  }

  const YAML::Node presets = child(root, "presets", "<root>");
  if (!presets.IsMap()) parse_fail(presets, "presets", "expected a mapping");
  for (const auto& kv : presets) {
    const auto name = kv.first.as<std::string>();
    cfg.presets[name] = parse_pose(kv.second, "presets." + name);
  }
  return cfg;
}

void validate_config(const HandConfig& cfg) {
  try {
    validate(cfg.hand);
    validate(cfg.actuators);
  } catch (const Error& e) {
    throw Error(ErrorCode::validation_error, e.what());
  }
  if (!(cfg.coupling.ratio > 0.0)) throw Error(ErrorCode::validation_error, "coupling ratio rho > 0 violated");
  for (const auto& [name, pose] : cfg.presets) {
    for (Finger f : kAllFingers) {
      const auto& finger = cfg.hand.finger(f);
      const std::string who = "preset '" + name + "' " + std::string(to_string(f)) + ": ";
      if (!rom_violations(finger, pose[f]).empty()) throw Error(ErrorCode::validation_error, who + "angles outside ROM");
      if (!cfg.coupling.satisfied(finger.kind, pose[f])) {
        throw Error(ErrorCode::validation_error, who + "coupled joints violate the coupling ratio");
      }
    }
  }
}

// ---- emission ----

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Placements are re-derived from a rotation matrix; 12 significant digits
// keep dump -> parse -> dump stable.
double rounded(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

template <class Range>
std::string list(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ", ";
    out += num(v);
    first = false;
  }
  return out + "]";
}

void emit_finger(std::ostream& os, Finger which, const FingerModel& f, const RigidTransform& placement) {
  os << "  " << to_string(which) << ":\n";
  os << "    kind: " << to_string(f.kind) << "\n";
  os << "    joints:\n";
  for (const auto& j : f.joints) {
    const bool flex = j.axis == JointAxis::flexion_y;
    os << "      - {axis: " << (flex ? "flexion" : "deviation") << ", r_mm: " << num(j.radius)
       << ", kappa_mm: " << num(j.flex_offset) << ", gamma_mm: " << num(j.lateral_spacing) << ", "
       << (flex ? "beta_deg" : "alpha_deg") << ": " << num(j.surface_angle) << ", rom_deg: "
       << list(std::array<double, 2>{j.rom_min, j.rom_max}) << "}\n";
  }
  os << "    links:\n";
  for (const auto& l : f.links) {
    os << "      - {length_mm: " << num(l.length);
    if (l.width_g) os << ", G_mm: " << num(*l.width_g);
    if (l.width_k) os << ", K_mm: " << num(*l.width_k);
    os << "}\n";
  }
  Eigen::Vector3d axis;
  double deg = 0.0;
  placement.to_axis_angle(axis, deg);
  const auto& t = placement.translation();
  os << "    placement:\n";
  os << "      translation_mm: " << list(std::array<double, 3>{rounded(t.x()), rounded(t.y()), rounded(t.z())})
     << "\n";
  os << "      axis: " << list(std::array<double, 3>{rounded(axis.x()), rounded(axis.y()), rounded(axis.z())}) << "\n";
  os << "      angle_deg: " << num(rounded(deg)) << "\n";
}

}  // namespace

HandConfig default_config() {
  HandConfig cfg;
  cfg.hand = default_hand();
  cfg.actuators = ActuatorConfig::uniform(5.0);
  cfg.coupling = CouplingRule{1.0};
  cfg.presets = default_presets();
  return cfg;
}

std::filesystem::path default_config_path() { return RCJHAND_DEFAULT_CONFIG; }

HandConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw Error(ErrorCode::parse_error, "line 1: empty document");
  HandConfig cfg;
  try {
    cfg = parse_document(root);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  validate_config(cfg);
  return cfg;
}

HandConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string dump_config(const HandConfig& cfg) {
  std::ostringstream os;
  os << "version: " << kConfigVersion << "\n";
  os << "thumb_length_mm: " << num(cfg.hand.thumb_length) << "\n";
  os << "fingers:\n";
  for (Finger f : kAllFingers) emit_finger(os, f, cfg.hand.finger(f), cfg.hand.placement(f));
  os << "actuation:\n";
  os << "  coupling_ratio: " << num(cfg.coupling.ratio) << "\n";
  os << "  motors:\n";
  for (const auto& m : cfg.actuators.motors) {
    os << "    - {finger: " << to_string(m.finger) << ", pair: " << m.pair
       << ", bobbin_radius_mm: " << num(m.bobbin_radius) << ", direction: " << m.direction << "}\n";
  }
  os << "presets:\n";
  for (const auto& [name, pose] : cfg.presets) {
    os << "  " << name << ":\n";
    for (Finger f : kAllFingers) os << "    " << to_string(f) << ": " << list(pose[f]) << "\n";
  }
  return os.str();
}

void save_config(const HandConfig& cfg, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write config '" + path.string() + "'");
  out << dump_config(cfg);
  if (!out) throw Error(ErrorCode::io_error, "failed writing config '" + path.string() + "'");
}

bool equivalent(const HandConfig& a, const HandConfig& b, double tol) {
  if (!(a.hand.fingers == b.hand.fingers) || a.hand.thumb_length != b.hand.thumb_length) return false;
  for (int i = 0; i < 5; ++i) {
    if (!approx_equal(a.hand.placements[i], b.hand.placements[i], tol)) return false;
  }
  return a.actuators == b.actuators && a.coupling == b.coupling && a.presets == b.presets;
}

std::string config_hash(const HandConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rcjhand
