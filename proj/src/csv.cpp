#include "rcjhand/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rcjhand/error.hpp"

namespace rcjhand {

namespace {

constexpr const char* kTrajectoryHeader = "t_s,finger,tip_x_mm,tip_y_mm,tip_z_mm";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string provenance_line(std::string_view config_hash) {
  return std::string("# rcjhand ") + RCJHAND_VERSION + " config=" + std::string(config_hash);
}

std::string sweep_csv(const SweepResult& result, std::string_view provenance) {
  std::ostringstream os;
  os << provenance << "\n" << "kappa_mm,beta_deg,r_opt_mm,residual_mm\n";
  for (const auto& c : result.cells) {
    os << format_number(c.kappa, 3) << ',' << format_number(c.beta, 3) << ',';
    if (c.optimum) {
      os << format_number(c.optimum->radius, 6) << ',' << format_number(c.optimum->residual, 6);
    } else {
      os << "NA,NA";
    }
    os << "\n";
  }
  return os.str();
}

std::string workspace_csv(const VoxelGrid& grid, std::string_view provenance) {
  std::ostringstream os;
  os << provenance << "\n" << "x_mm,y_mm,z_mm\n";
  for (const auto& c : grid.occupied_centers()) {
    os << format_number(c.x(), 4) << ',' << format_number(c.y(), 4) << ',' << format_number(c.z(), 4) << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj, std::string_view provenance) {
  std::ostringstream os;
  os << provenance << "\n" << kTrajectoryHeader << "\n";
  for (const auto& s : traj.samples) {
    for (Finger f : kAllFingers) {
      const auto& p = s.tips[static_cast<int>(f)];
      os << format_number(s.t, 6) << ',' << to_string(f) << ',' << format_number(p.x(), 6) << ','
         << format_number(p.y(), 6) << ',' << format_number(p.z(), 6) << "\n";
    }
  }
  return os.str();
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  // Rows are grouped by their literal time field, in file order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, std::array<std::optional<Eigen::Vector3d>, 5>>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kTrajectoryHeader) {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": expected header '" +
                                                kTrajectoryHeader + "'");
      }
      header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": expected 5 fields");
    }
    const auto finger = finger_from_string(trim(fields[1]));
    if (!finger) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": unknown finger '" + fields[1] + "'");
    }
    const std::string key = trim(fields[0]);
    auto [it, fresh] = rows.try_emplace(key);
    if (fresh) {
      it->second.first = parse_double(key, lineno);
      order.push_back(key);
    }
    auto& slot = it->second.second[static_cast<int>(*finger)];
    if (slot) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": duplicate row for " +
                                              std::string(to_string(*finger)) + " at t=" + key);
    }
    slot = Eigen::Vector3d(parse_double(trim(fields[2]), lineno), parse_double(trim(fields[3]), lineno),
                           parse_double(trim(fields[4]), lineno));
  }
  if (!header) throw Error(ErrorCode::parse_error, "missing header '" + std::string(kTrajectoryHeader) + "'");

  Trajectory traj;
  for (const auto& key : order) {
    const auto& [t, tips] = rows.at(key);
    TrajectorySample s;
    s.t = t;
    for (int f = 0; f < 5; ++f) {
      if (!tips[f]) {
        throw Error(ErrorCode::parse_error, "t=" + key + ": missing row for " +
                                                std::string(to_string(static_cast<Finger>(f))));
      }
      s.tips[f] = *tips[f];
    }
    if (!traj.samples.empty() && !(t > traj.samples.back().t)) {
      throw Error(ErrorCode::parse_error, "t=" + key + ": times must strictly increase");
    }
    traj.samples.push_back(s);
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  try {
    return parse_trajectory_csv(read_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io_error) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rcjhand
