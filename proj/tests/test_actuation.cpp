#include <gtest/gtest.h>

#include <random>

#include "rcjhand/actuation.hpp"
#include "rcjhand/error.hpp"

using namespace rcjhand;

namespace {

// Motor order of ActuatorConfig::uniform: (base-a, base-b, distal) per finger, thumb first.
std::size_t motor(Finger f, int k) { return static_cast<std::size_t>(f) * 3 + k; }

Pose random_pose(const HandModel& hand, const CouplingRule& rule, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Pose p;
  for (Finger f : kAllFingers) {
    const auto& fm = hand.finger(f);
    const auto [lead, follow] = CouplingRule::coupled_joints(fm.kind);
    for (int j = 0; j < 4; ++j) p[f][j] = fm.joints[j].rom_min + u(rng) * (fm.joints[j].rom_max - fm.joints[j].rom_min);
    p[f][lead] = u(rng) * rule.leading_max(fm);
    p[f][follow] = rule.ratio * p[f][lead];
  }
  return p;
}

}  // namespace

TEST(Actuation, ZeroPoseIsZeroMotor) {
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  const auto s = pose_to_motor(hand, Pose{}, cfg);
  ASSERT_EQ(s.angle.size(), 15u);
  for (double a : s.angle) EXPECT_EQ(a, 0.0);
  const auto back = motor_to_pose(hand, s, cfg);
  for (Finger f : kAllFingers)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(back[f][j], 0.0, 1e-9);
}

TEST(Actuation, PureDeviationPaysOutOpposite) {
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  Pose p;
  p[Finger::index] = {20, 0, 0, 0};
  const auto s = pose_to_motor(hand, p, cfg);
  const double a = s.payout(cfg, motor(Finger::index, 0)), b = s.payout(cfg, motor(Finger::index, 1));
  EXPECT_LT(a, 0.0);
  EXPECT_GT(b, 0.0);
  EXPECT_EQ(s.angle[motor(Finger::index, 2)], 0.0);
}

TEST(Actuation, PureFlexionPaysOutAlike) {
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  Pose p;
  p[Finger::middle] = {0, 60, 0, 0};
  const auto s = pose_to_motor(hand, p, cfg);
  EXPECT_NEAR(s.angle[motor(Finger::middle, 0)], s.angle[motor(Finger::middle, 1)], 1e-12);
  EXPECT_LT(s.angle[motor(Finger::middle, 0)], 0.0);
}

TEST(Actuation, RoundTrip) {
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  for (double ratio : {1.0, 0.7}) {
    const CouplingRule rule{ratio};
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
      const Pose p = random_pose(hand, rule, rng);
      const auto s = pose_to_motor(hand, p, cfg, rule);
      const Pose q = motor_to_pose(hand, s, cfg, rule);
      for (Finger f : kAllFingers)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(q[f][j], p[f][j], 1e-6);
      const auto s2 = pose_to_motor(hand, q, cfg, rule);
      for (std::size_t m = 0; m < s.angle.size(); ++m) EXPECT_NEAR(s2.payout(cfg, m), s.payout(cfg, m), 1e-6);
    }
  }
}

TEST(Actuation, DirectionFlipsSign) {
  const auto hand = default_hand();
  auto cfg = ActuatorConfig::uniform();
  Pose p;
  p[Finger::ring] = {0, 40, 30, 30};
  const auto a = pose_to_motor(hand, p, cfg);
  cfg.motors[motor(Finger::ring, 2)].direction = -1;
  const auto b = pose_to_motor(hand, p, cfg);
  EXPECT_EQ(a.angle[motor(Finger::ring, 2)], -b.angle[motor(Finger::ring, 2)]);
  const auto q = motor_to_pose(hand, b, cfg);
  EXPECT_NEAR(q[Finger::ring][2], 30.0, 1e-6);
}

TEST(Actuation, UnreachablePayout) {
  const auto hand = default_hand();
  const auto cfg = ActuatorConfig::uniform();
  MotorState s;
  s.angle.assign(15, 0.0);
  s.angle[motor(Finger::index, 2)] = -100.0;
  try {
    motor_to_pose(hand, s, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unreachable_payout);
  }
}

TEST(Actuation, CouplingViolation) {
  const auto hand = default_hand();
  Pose p;
  p[Finger::index] = {0, 10, 40, 20};
  try {
    pose_to_motor(hand, p, ActuatorConfig::uniform());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::coupling_violation);
  }
  p[Finger::index] = {0, 0, 0, 0};
  p[Finger::thumb] = {0, 30, 20, 0};
  EXPECT_THROW(pose_to_motor(hand, p, ActuatorConfig::uniform()), Error);
}

TEST(Actuation, RomChecked) {
  Pose p;
  p[Finger::little] = {0, 120, 0, 0};
  try {
    pose_to_motor(default_hand(), p, ActuatorConfig::uniform());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rom_violation);
  }
}

TEST(Actuation, ConfigValidation) {
  EXPECT_NO_THROW(validate(ActuatorConfig::uniform()));
  auto cfg = ActuatorConfig::uniform();
  cfg.motors[0].bobbin_radius = 0.0;
  EXPECT_THROW(validate(cfg), Error);
  cfg = ActuatorConfig::uniform();
  cfg.motors.pop_back();
  EXPECT_THROW(validate(cfg), Error);
  cfg = ActuatorConfig::uniform();
  cfg.motors[1].pair = "distal";
  EXPECT_THROW(validate(cfg), Error);
  cfg = ActuatorConfig::uniform();
  cfg.motors[2].direction = 0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Actuation, CouplingRule) {
  EXPECT_EQ(CouplingRule::coupled_joints(FingerKind::finger), (std::array<int, 2>{2, 3}));
  EXPECT_EQ(CouplingRule::coupled_joints(FingerKind::thumb), (std::array<int, 2>{1, 2}));
  EXPECT_DOUBLE_EQ(CouplingRule{2.0}.leading_max(default_finger()), 50.0);
  EXPECT_DOUBLE_EQ(CouplingRule{0.5}.leading_max(default_finger()), 100.0);
  EXPECT_TRUE(CouplingRule{}.satisfied(FingerKind::finger, {0, 10, 30, 30}));
}

TEST(Presets, AllValidAndCoupled) {
  const auto hand = default_hand();
  const auto& presets = default_presets();
  EXPECT_EQ(presets.size(), 19u);
  for (const char* name : {"open", "close", "pinch", "tripod", "lateral-pinch", "power-sphere"}) {
    EXPECT_TRUE(presets.count(name)) << name;
  }
  for (const auto& [name, pose] : presets) {
    EXPECT_NO_THROW(hand_fk(hand, pose)) << name;
    EXPECT_NO_THROW(pose_to_motor(hand, pose, ActuatorConfig::uniform())) << name;
  }
  try {
    preset_pose("jazz-hands");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_preset);
  }
}
