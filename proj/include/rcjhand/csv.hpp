#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rcjhand/radius_opt.hpp"
#include "rcjhand/trajectory.hpp"
#include "rcjhand/workspace.hpp"

namespace rcjhand {

/// Fixed-point decimal with `digits` fractional digits; never prints "-0".
std::string format_number(double value, int digits = 6);

/// "# rcjhand <version> config=<hash>" comment row.
std::string provenance_line(std::string_view config_hash);

std::string sweep_csv(const SweepResult& result, std::string_view provenance);
std::string workspace_csv(const VoxelGrid& grid, std::string_view provenance);
/// Long format: t_s,finger,tip_x_mm,tip_y_mm,tip_z_mm.
std::string trajectory_csv(const Trajectory& traj, std::string_view provenance);
/// Comment rows (#) and the header are skipped; every finger must appear at every time.
Trajectory parse_trajectory_csv(const std::string& text);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace rcjhand
