#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "rcjhand/error.hpp"
#include "rcjhand/kinematics.hpp"
#include "rcjhand/units.hpp"

using namespace rcjhand;

namespace {

RigidTransform random_transform(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Vector3d axis(u(rng), u(rng), u(rng) + 1.5);
  return RigidTransform::from_axis_angle(axis, 180.0 * u(rng), {50 * u(rng), 50 * u(rng), 50 * u(rng)});
}

double inset(const JointGeometry& j) { return j.flex_offset - j.radius * std::tan(deg2rad(0.5 * j.surface_angle)); }

template <class F>
void expect_error(ErrorCode code, F&& f, const std::string& needle = {}) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    if (!needle.empty()) EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Transform, GroupLaws) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    EXPECT_TRUE(approx_equal((a * b) * c, a * (b * c), 1e-9));
    EXPECT_TRUE(approx_equal(a * a.inverse(), RigidTransform::identity(), 1e-12));
    EXPECT_TRUE(approx_equal(a.inverse() * a, RigidTransform::identity(), 1e-12));
    EXPECT_TRUE(approx_equal(a * RigidTransform::identity(), a, 0.0));
    EXPECT_TRUE((a * b).is_proper(1e-12));
    const Eigen::Vector3d p(1.0, -2.0, 3.0);
    EXPECT_LT(((a * b) * p - a * (b * p)).norm(), 1e-9);
  }
}

TEST(Transform, AxisAngleRoundTrip) {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_transform(rng);
    Eigen::Vector3d axis;
    double deg = 0;
    a.to_axis_angle(axis, deg);
    EXPECT_TRUE(approx_equal(RigidTransform::from_axis_angle(axis, deg, a.translation()), a, 1e-12));
  }
}

TEST(Kinematics, RollAtZeroIsPureLift) {
  const auto t = roll_transform(3.3, JointAxis::flexion_y, 0.0);
  EXPECT_TRUE(approx_equal(t, RigidTransform::from_translation({0, 0, 6.6}), 0.0));
}

TEST(Kinematics, RollSplitsAngleAtContact) {
  // Rotation is the full angle; the distal centre sits 2r along the half-angle direction.
  const double r = 4.9, a = 70.0;
  const auto t = roll_transform(r, JointAxis::flexion_y, a);
  EXPECT_TRUE(approx_equal(RigidTransform(t.rotation(), Eigen::Vector3d::Zero()),
                           RigidTransform::rot_y(deg2rad(a)), 1e-15));
  const double h = 0.5 * deg2rad(a);
  EXPECT_LT((t.translation() - Eigen::Vector3d(2 * r * std::sin(h), 0, 2 * r * std::cos(h))).norm(), 1e-12);
}

TEST(Kinematics, ZeroPoseClosedForm) {
  for (const auto& finger : {default_thumb(), default_finger()}) {
    const auto frames = finger_fk(finger, {0, 0, 0, 0});
    double length = 0;
    for (const auto& l : finger.links) length += l.length;
    const Eigen::Vector3d expected(inset(finger.joints[3]) - inset(finger.joints[1]), 0.0,
                                   length + finger.joints[0].radius);
    EXPECT_LT((frames.tip().translation() - expected).norm(), 1e-9);
    EXPECT_TRUE(approx_equal(RigidTransform(frames.tip().rotation(), Eigen::Vector3d::Zero()),
                             RigidTransform::identity(), 1e-15));
  }
}

TEST(Kinematics, MatchesOracleFrames) {
  std::ifstream in(std::string(RCJHAND_GOLDEN_DIR) + "/fk.json");
  ASSERT_TRUE(in.good());
  const auto doc = nlohmann::json::parse(in);
  int cases = 0;
  for (const auto& c : doc["cases"]) {
    const auto finger = c["kind"] == "thumb" ? default_thumb() : default_finger();
    const auto q = c["angles_deg"].get<std::vector<double>>();
    const auto frames = finger_fk(finger, {q[0], q[1], q[2], q[3]});
    for (int i = 0; i < kFrameCount; ++i) {
      const auto& g = c["frames"][i];
      for (int r = 0; r < 3; ++r) {
        EXPECT_NEAR(frames.frames[i].translation()[r], g["translation_mm"][r].get<double>(), 1e-9);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(frames.frames[i].rotation()(r, k), g["rotation"][r][k].get<double>(), 1e-12);
      }
    }
    ++cases;
  }
  EXPECT_EQ(cases, 12);
}

TEST(Kinematics, ChainIsContinuous) {
  // Tip speed is bounded by the distance from each joint to the tip.
  const auto finger = default_finger();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    JointAngles q{-30 + 60 * u(rng), 100 * u(rng), 100 * u(rng), 100 * u(rng)};
    JointAngles p = q;
    const int j = i % 4;
    p[j] = std::clamp(q[j] + 0.01, finger.joints[j].rom_min, finger.joints[j].rom_max);
    const double moved = (finger_fk(finger, p).tip().translation() - finger_fk(finger, q).tip().translation()).norm();
    EXPECT_LE(moved, deg2rad(std::abs(p[j] - q[j])) * (finger.total_length() + 2 * 4.9) + 1e-12);
  }
}

TEST(Kinematics, RangeOfMotionConsistency) {
  for (const auto& finger : {default_thumb(), default_finger()}) {
    const auto& dev = finger.joints[0];
    EXPECT_EQ(dev.axis, JointAxis::deviation_x);
    EXPECT_DOUBLE_EQ(dev.rom_max - dev.rom_min, 4.0 * dev.surface_angle);
    EXPECT_DOUBLE_EQ(dev.rom_min, -dev.rom_max);
    for (int j = 1; j < 4; ++j) {
      const auto& jg = finger.joints[j];
      EXPECT_EQ(jg.axis, JointAxis::flexion_y);
      EXPECT_DOUBLE_EQ(jg.rom_min, 0.0);
      EXPECT_DOUBLE_EQ(jg.rom_max, 100.0);
      EXPECT_DOUBLE_EQ(jg.rom_max - jg.rom_min, 2.0 * jg.surface_angle);
    }
  }
  EXPECT_DOUBLE_EQ(default_thumb().joints[0].rom_max, 45.0);
  EXPECT_DOUBLE_EQ(default_finger().joints[0].rom_max, 30.0);
  EXPECT_DOUBLE_EQ(default_hand().thumb_length, 106.0);
  EXPECT_NO_THROW(validate(default_hand()));
}

TEST(Kinematics, ShippedParameters) {
  const auto f = default_finger();
  EXPECT_DOUBLE_EQ(f.joints[1].radius, 4.9);
  EXPECT_DOUBLE_EQ(f.joints[1].flex_offset, 12.7);
  EXPECT_DOUBLE_EQ(f.joints[1].surface_angle, 50.0);
  const auto t = default_thumb();
  EXPECT_DOUBLE_EQ(t.joints[0].radius, 3.4);
  EXPECT_DOUBLE_EQ(t.joints[0].lateral_spacing, 9.5);
  EXPECT_DOUBLE_EQ(t.joints[0].surface_angle, 22.5);
  EXPECT_DOUBLE_EQ(t.total_length(), 106.0);
}

TEST(Kinematics, ValidationNamesInvariant) {
  auto f = default_finger();
  f.joints[1].radius = -1.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "r > 0");
  f = default_finger();
  f.joints[1].rom_max = 90.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "2*beta");
  f = default_finger();
  f.joints[0].rom_min = -20.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "4*alpha");
  f = default_finger();
  f.joints[2].radius = f.joints[2].flex_offset + 1.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "r < kappa");
  f = default_finger();
  f.links[2].length = 5.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "non-positive span");
  f = default_finger();
  f.links[1].width_g = 10.0;
  f.links[2].width_g = 12.0;
  expect_error(ErrorCode::invalid_geometry, [&] { validate(f); }, "taper");
}

TEST(Kinematics, RomModes) {
  const auto f = default_finger();
  expect_error(ErrorCode::rom_violation, [&] { finger_fk(f, {0, 0, 0, 101}); });
  expect_error(ErrorCode::rom_violation, [&] { finger_fk(f, {31, 0, 0, 0}); });
  EXPECT_EQ(rom_violations(f, {40, -1, 50, 120}), (std::vector<int>{0, 1, 3}));
  const auto clamped = validate_rom(f, {40, -1, 50, 120}, RomCheck::clamp);
  EXPECT_EQ(clamped, (JointAngles{30, 0, 50, 100}));
  EXPECT_TRUE(approx_equal(finger_fk(f, {40, -1, 50, 120}, RomCheck::clamp).tip(), finger_fk(f, clamped).tip(), 0.0));
  EXPECT_NO_THROW(finger_fk(f, {0, 0, 0, 100 + 1e-12}));
}

TEST(Kinematics, HandFrameCovariance) {
  const auto hand = default_hand();
  Pose pose;
  pose[Finger::index] = {10, 30, 40, 40};
  pose[Finger::thumb] = {-20, 50, 50, 10};
  const auto x = RigidTransform::from_axis_angle({0.3, -1, 0.2}, 37.0, {5, -7, 11});
  const auto a = hand_fk(hand, pose);
  const auto b = hand_fk(hand.transformed(x), pose);
  for (int f = 0; f < 5; ++f) EXPECT_TRUE(approx_equal(x * a[f], b[f], 1e-9));
  const auto s = hand_fk(hand.scaled(2.0), pose);
  for (int f = 0; f < 5; ++f) EXPECT_LT((s[f].translation() - 2.0 * a[f].translation()).norm(), 1e-9);
}

TEST(Kinematics, FlexionBendsPalmward) {
  const auto f = default_finger();
  EXPECT_GT(finger_fk(f, {0, 60, 0, 0}).tip().translation().x(), finger_fk(f, {0, 0, 0, 0}).tip().translation().x());
  // Positive deviation bends ulnar (-y).
  EXPECT_LT(finger_fk(f, {20, 0, 0, 0}).tip().translation().y(), 0.0);
}
