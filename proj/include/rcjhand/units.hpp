#pragma once

#include <numbers>

namespace rcjhand {

// Public APIs take millimetres and degrees; trigonometry runs in radians.
inline constexpr double kGeometryTol = 1e-9;
inline constexpr double kIterativeTol = 1e-6;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace rcjhand
