#include "bciarm/arm/arm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::arm {

namespace {

constexpr std::array<std::string_view, kServoCount> kJointNames = {"Base",     "Shoulder",   "Elbow",
                                                                    "WristRot", "WristTrans", "Gripper"};

std::string fold(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

kin::DhTable table_for(const kin::LinkLengths& links, const std::array<ServoJoint, kServoCount>& joints) {
  auto limits = kin::DhTable::default_limits();
  for (const ServoJoint& j : joints) {
    if (auto idx = dh_index(j.name)) limits[*idx] = {j.min_deg - j.zero_deg, j.max_deg - j.zero_deg};
  }
  return kin::DhTable(links, limits);
}

void refresh_pose(ArmState& s) { s.pose = kin::fk(s.table, joint_angles(s)); }

}  // namespace

std::string_view joint_name(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::optional<Joint> parse_joint(std::string_view text) {
  const std::string key = fold(text);
  for (Joint j : kAllJoints) {
    if (fold(joint_name(j)) == key) return j;
  }
  return std::nullopt;
}

std::string_view direction_name(Direction d) { return d == Direction::CW ? "CW" : "CCW"; }

std::optional<std::size_t> dh_index(Joint j) {
  switch (j) {
    case Joint::Base: return 0;
    case Joint::Shoulder: return 1;
    case Joint::Elbow: return 2;
    case Joint::WristTrans: return 3;
    case Joint::WristRot: return 4;
    case Joint::Gripper: return std::nullopt;
  }
  return std::nullopt;
}

double pulse_to_angle(double pulse_ms) {
  if (!(pulse_ms >= 1.0 && pulse_ms <= 2.0)) {
    throw DomainError("servo pulse " + text::format_double(pulse_ms) + " ms outside [1, 2] ms");
  }
  return (pulse_ms - 1.0) * 180.0;
}

double angle_to_pulse(double deg) {
  if (!(deg >= 0.0 && deg <= 180.0)) {
    throw DomainError("servo angle " + text::format_double(deg) + " deg outside [0, 180]");
  }
  return 1.0 + deg / 180.0;
}

const Binding& CommandBinding::at(Command c) const {
  const auto& b = find(c);
  if (!b) throw DomainError("label " + std::string(name(c)) + " is not bound to a joint");
  return *b;
}

CommandBinding default_bindings(const std::array<double, kServoCount>& step) {
  auto s = [&](Joint j) { return step[static_cast<std::size_t>(j)]; };
  CommandBinding b;
  b.bind(Command::MoveRight, {Joint::Base, Direction::CW, s(Joint::Base)});
  b.bind(Command::MoveLeft, {Joint::Base, Direction::CCW, s(Joint::Base)});
  b.bind(Command::Push, {Joint::Shoulder, Direction::CW, s(Joint::Shoulder)});
  b.bind(Command::Pull, {Joint::Shoulder, Direction::CCW, s(Joint::Shoulder)});
  b.bind(Command::Lift, {Joint::Elbow, Direction::CW, s(Joint::Elbow)});
  b.bind(Command::Drop, {Joint::Elbow, Direction::CCW, s(Joint::Elbow)});
  b.bind(Command::RaiseBrows, {Joint::WristRot, Direction::CW, s(Joint::WristRot)});
  b.bind(Command::FurrowBrows, {Joint::WristRot, Direction::CCW, s(Joint::WristRot)});
  b.bind(Command::WinkLeft, {Joint::WristTrans, Direction::CW, s(Joint::WristTrans)});
  b.bind(Command::WinkRight, {Joint::WristTrans, Direction::CCW, s(Joint::WristTrans)});
  b.bind(Command::Smile, {Joint::Gripper, Direction::CW, s(Joint::Gripper)});
  b.bind(Command::ClenchTeeth, {Joint::Gripper, Direction::CCW, s(Joint::Gripper)});
  return b;
}

CommandBinding default_bindings(double step_deg) {
  std::array<double, kServoCount> steps;
  steps.fill(step_deg);
  return default_bindings(steps);
}

ArmState make_arm(const ArmConfig& cfg) {
  ArmState s;
  for (std::size_t i = 0; i < kServoCount; ++i) {
    const JointConfig& jc = cfg.joints[i];
    const Joint name = kAllJoints[i];
    if (!(jc.min_deg >= 0.0 && jc.min_deg < jc.max_deg && jc.max_deg <= 180.0)) {
      throw DomainError(std::string(joint_name(name)) + ": limits must satisfy 0 <= min < max <= 180");
    }
    if (!(jc.initial_deg >= jc.min_deg && jc.initial_deg <= jc.max_deg)) {
      throw DomainError(std::string(joint_name(name)) + ": initial angle outside limits");
    }
    if (!(jc.max_step_deg > 0.0)) throw DomainError(std::string(joint_name(name)) + ": slew must be positive");
    s.joints[i] = {name, jc.initial_deg, jc.initial_deg, jc.min_deg, jc.max_deg, jc.max_step_deg, jc.zero_deg};
  }
  s.table = table_for(cfg.links, s.joints);
  refresh_pose(s);
  return s;
}

kin::JointAngles joint_angles(const ArmState& s) {
  kin::JointAngles q;
  for (const ServoJoint& j : s.joints) {
    if (auto idx = dh_index(j.name)) q[*idx] = j.angle - j.zero_deg;
  }
  return q;
}

ArmState apply_command(const ArmState& s, const CommandBinding& binding, Command cmd) {
  const Binding& b = binding.at(cmd);
  ArmState out = s;
  ServoJoint& j = out.joint(b.joint);
  const double delta = b.direction == Direction::CW ? b.step_deg : -b.step_deg;
  j.target = std::clamp(j.target + delta, j.min_deg, j.max_deg);
  return out;
}

ArmState tick(const ArmState& s) {
  ArmState out = s;
  bool moved = false;
  for (ServoJoint& j : out.joints) {
    const double gap = j.target - j.angle;
    if (gap == 0.0) continue;
    if (std::abs(gap) <= j.max_step_deg) {
      j.angle = j.target;
    } else {
      j.angle += gap > 0.0 ? j.max_step_deg : -j.max_step_deg;
    }
    j.angle = std::clamp(j.angle, j.min_deg, j.max_deg);
    moved = true;
  }
  ++out.tick_count;
  if (moved) refresh_pose(out);
  return out;
}

bool settled(const ArmState& s) {
  return std::all_of(s.joints.begin(), s.joints.end(), [](const ServoJoint& j) { return j.angle == j.target; });
}

ArmState set_limits(const ArmState& s, Joint which, double min_deg, double max_deg) {
  if (!(min_deg >= 0.0 && min_deg < max_deg && max_deg <= 180.0)) {
    throw DomainError("limits must satisfy 0 <= min < max <= 180");
  }
  const ServoJoint& cur = s.joint(which);
  if (cur.angle < min_deg || cur.angle > max_deg) {
    throw DomainError(std::string(joint_name(which)) + " is at " + text::format_double(cur.angle) +
                      " deg, outside the requested limits");
  }
  ArmState out = s;
  ServoJoint& j = out.joint(which);
  j.min_deg = min_deg;
  j.max_deg = max_deg;
  j.target = std::clamp(j.target, min_deg, max_deg);
  out.table = table_for(s.table.lengths(), out.joints);
  return out;
}

std::uint64_t ticks_to_cover(double distance, double max_step) {
  if (distance <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(distance / max_step));
}

}  // namespace bciarm::arm
