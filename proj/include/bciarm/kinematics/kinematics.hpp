#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

namespace bciarm::kin {

inline constexpr std::size_t kJoints = 6;

// One modified-DH (Craig) row: rotate-x alpha_prev, translate-x a_prev,
// translate-z d, rotate-z (theta + theta_offset).
struct DhRow {
  double alpha_prev_deg{0.0};
  double a_prev_mm{0.0};
  double d_mm{0.0};
  double theta_offset_deg{0.0};
  bool theta_is_variable{true};
};

struct LinkLengths {
  double l1{100.0};  // base to shoulder (d1)
  double l2{105.0};  // upper arm (a2)
  double l3{100.0};  // forearm (a3)
  double l4{60.0};   // wrist to tool point (d6)
};

struct JointLimit {
  double min_deg{-90.0};
  double max_deg{90.0};
};

// Six-row table of the 5-DOF arm plus a fixed tool frame:
//
//   i  alpha_{i-1}  a_{i-1}  d_i  theta_i
//   1      0          0      L1   t1
//   2    -90          0       0   t2 - 90
//   3      0         L2       0   t3
//   4      0         L3       0   t4
//   5    -90          0       0   t5
//   6      0          0      L4   0
class DhTable {
 public:
  DhTable() : DhTable(LinkLengths{}) {}
  // Lengths must be finite and non-negative with L1 > 0; IK additionally
  // needs L2, L3 > 0.
  explicit DhTable(const LinkLengths& lengths, const std::array<JointLimit, kJoints>& limits = default_limits());

  static std::array<JointLimit, kJoints> default_limits();

  const std::array<DhRow, kJoints>& rows() const { return rows_; }
  const LinkLengths& lengths() const { return lengths_; }
  const std::array<JointLimit, kJoints>& limits() const { return limits_; }

 private:
  LinkLengths lengths_;
  std::array<JointLimit, kJoints> limits_;
  std::array<DhRow, kJoints> rows_;
};

// User-facing joint values in degrees. theta[5] is the fixed tool joint and
// stays 0.
struct JointAngles {
  std::array<double, kJoints> theta{};

  double& operator[](std::size_t i) { return theta[i]; }
  double operator[](std::size_t i) const { return theta[i]; }
  bool operator==(const JointAngles&) const = default;
};

struct Pose {
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};  // columns n, o, a
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};      // mm

  Eigen::Matrix4d matrix() const;
};

struct IkSolution {
  JointAngles elbow_up;    // s3 >= 0
  JointAngles elbow_down;  // s3 <= 0
  bool reachable{false};
};

// Elementary transform of one row at joint value theta_deg.
Eigen::Matrix4d dh_transform(const DhRow& row, double theta_deg);

Pose fk(const DhTable& table, const JointAngles& q);

// Closed-form solution for the target pose.
//   t1   = atan2(py, px), flipped by 180 deg when that leaves the joint-1
//          limits; on the base axis it follows the approach direction,
//          and only when that is vertical too is the hint's t1 kept
//   t234 = atan2(-az, c1*ax + s1*ay)
//   u    = c1*px + s1*py - L4*cos(t234),  v = pz - L1 + L4*sin(t234)
//   c3   = (u^2 + v^2 - L2^2 - L3^2) / (2*L2*L3),  s3 = +-sqrt(1 - c3^2)
//   t2   = atan2(k1*u - k2*v, k1*v + k2*u),  k1 = L2 + L3*c3, k2 = L3*s3
//   t4   = t234 - t2 - t3
//   t5   = residual rotation about the tool axis: with R0 the orientation at
//          (t1, t234, t5 = 0), R0^T R = RotZ(t5). Away from the vertical
//          approach this equals atan2(-oz, nz) up to the sign of cos(t234).
// reachable is false when |c3| > 1 + 1e-9; values within that margin are
// clamped. Throws DomainError for a non-orthonormal rotation or when
// L2 or L3 is zero.
IkSolution ik(const DhTable& table, const Pose& target, const JointAngles& hint = {});

// Branch with the smaller sum of |delta theta| from `current`; ties go to
// elbow_up. Throws DomainError when the solution is unreachable.
JointAngles select_branch(const IkSolution& sol, const JointAngles& current);

bool within_limits(const DhTable& table, const JointAngles& q, double tol_deg = 1e-9);

// Frobenius norm of R^T R - I.
double orthonormality_error(const Eigen::Matrix3d& r);

// Plain-text forms used by the CLI.
//   angles: "t1 t2 t3 t4 t5 t6"
//   pose:   "x y z\nr00 r01 r02 r10 r11 r12 r20 r21 r22"
std::string format_angles(const JointAngles& q);
std::string format_pose(const Pose& p);

}  // namespace bciarm::kin
