#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "bciarm/features/command.hpp"
#include "bciarm/kinematics/kinematics.hpp"

namespace bciarm::arm {

enum class Joint { Base, Shoulder, Elbow, WristRot, WristTrans, Gripper };
inline constexpr std::size_t kServoCount = 6;
inline constexpr std::array<Joint, kServoCount> kAllJoints = {
    Joint::Base, Joint::Shoulder, Joint::Elbow, Joint::WristRot, Joint::WristTrans, Joint::Gripper};

// CW increases the servo angle.
enum class Direction { CW, CCW };

std::string_view joint_name(Joint j);
std::optional<Joint> parse_joint(std::string_view text);
std::string_view direction_name(Direction d);

// Kinematic joint driven by each servo: Base->t1, Shoulder->t2, Elbow->t3,
// WristTrans (pitch)->t4, WristRot (roll)->t5. The gripper has none.
std::optional<std::size_t> dh_index(Joint j);

// One PWM period.
inline constexpr double kTickSeconds = 0.020;

// 1.0 ms -> 0 deg, 2.0 ms -> 180 deg. Out-of-range input throws DomainError.
double pulse_to_angle(double pulse_ms);
double angle_to_pulse(double deg);

struct ServoJoint {
  Joint name{Joint::Base};
  double angle{90.0};
  double target{90.0};
  double min_deg{0.0};
  double max_deg{180.0};
  double max_step_deg{3.0};  // per tick
  double zero_deg{90.0};     // servo angle at kinematic theta = 0
};

struct Binding {
  Joint joint{Joint::Base};
  Direction direction{Direction::CW};
  double step_deg{90.0};
};

class CommandBinding {
 public:
  void bind(Command c, Binding b) { table_[static_cast<std::size_t>(code(c) - 1)] = b; }
  void unbind(Command c) { table_[static_cast<std::size_t>(code(c) - 1)].reset(); }
  const std::optional<Binding>& find(Command c) const { return table_[static_cast<std::size_t>(code(c) - 1)]; }
  // Throws DomainError for an unbound label.
  const Binding& at(Command c) const;

 private:
  std::array<std::optional<Binding>, kCommandCount> table_{};
};

// Base: MoveRight/MoveLeft, Shoulder: Push/Pull, Elbow: Lift/Drop,
// WristRot: RaiseBrows/FurrowBrows, WristTrans: WinkLeft/WinkRight,
// Gripper: Smile/ClenchTeeth; the first of each pair is CW.
CommandBinding default_bindings(double step_deg = 90.0);
CommandBinding default_bindings(const std::array<double, kServoCount>& step_per_joint);

struct LastCommand {
  Command label{Command::Push};
  double confidence{0.0};
};

struct JointConfig {
  double min_deg{0.0};
  double max_deg{180.0};
  double max_step_deg{3.0};
  double initial_deg{90.0};
  double zero_deg{90.0};
  double step_deg{90.0};
};

struct ArmConfig {
  kin::LinkLengths links;
  std::array<JointConfig, kServoCount> joints{};
};

struct ArmState {
  std::array<ServoJoint, kServoCount> joints{};
  std::uint64_t tick_count{0};
  std::optional<LastCommand> last_command;
  kin::DhTable table;
  kin::Pose pose;  // always fk(table, joint_angles(*this))

  const ServoJoint& joint(Joint j) const { return joints[static_cast<std::size_t>(j)]; }
  ServoJoint& joint(Joint j) { return joints[static_cast<std::size_t>(j)]; }
};

// Throws DomainError for inconsistent limits or an initial angle outside them.
ArmState make_arm(const ArmConfig& cfg);

// Kinematic angles derived from the servo angles (theta = angle - zero).
kin::JointAngles joint_angles(const ArmState& s);

// Moves the bound joint's target by +-step (CW = +), clamped to its limits.
// Motion happens on later ticks.
ArmState apply_command(const ArmState& s, const CommandBinding& binding, Command cmd);

// Advances every joint toward its target by at most max_step_deg.
ArmState tick(const ArmState& s);

// Every joint at its target.
bool settled(const ArmState& s);

// Narrows or widens one joint's limits. The current angle must lie inside the
// new range; the target is clamped into it.
ArmState set_limits(const ArmState& s, Joint j, double min_deg, double max_deg);

// Ticks needed to close a gap of `distance` degrees at `max_step` per tick.
std::uint64_t ticks_to_cover(double distance, double max_step);

}  // namespace bciarm::arm
