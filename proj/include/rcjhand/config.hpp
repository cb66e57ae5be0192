#pragma once

#include <filesystem>
#include <string>

#include "rcjhand/actuation.hpp"
#include "rcjhand/kinematics.hpp"

namespace rcjhand {

inline constexpr int kConfigVersion = 1;

/// Everything a hand configuration document carries.
struct HandConfig {
  HandModel hand;
  ActuatorConfig actuators;
  CouplingRule coupling;
  PresetCatalog presets;
};

/// Shipped model and placements, 5 mm bobbins, ratio 1 and the default presets.
HandConfig default_config();

/// Path of the shipped default document (compile-time location).
std::filesystem::path default_config_path();

/// Throws parse_error (with line and key) or validation_error naming the violated invariant.
HandConfig parse_config(const std::string& text);
HandConfig load_config(const std::filesystem::path& path);

std::string dump_config(const HandConfig& cfg);
void save_config(const HandConfig& cfg, const std::filesystem::path& path);

/// Field-level equality; placements compare within `tol` since they are stored as axis-angle.
bool equivalent(const HandConfig& a, const HandConfig& b, double tol = 1e-12);

/// FNV-1a 64 of dump_config(cfg), as 16 hex digits.
std::string config_hash(const HandConfig& cfg);

}  // namespace rcjhand
