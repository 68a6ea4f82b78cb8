#include "bciarm/kinematics/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::kin {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kAxisEps = 1e-9;  // mm, radial distance treated as on-axis
constexpr double kOrthoTol = 1e-6;

double to_rad(double deg) { return deg * kDeg; }
double to_deg(double rad) { return rad / kDeg; }

// Wraps into (-180, 180].
double wrap_deg(double deg) {
  double w = std::remainder(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  return w;
}

bool in_limit(const JointLimit& lim, double deg) { return deg >= lim.min_deg && deg <= lim.max_deg; }

// Picks between a base angle and its 180-degree twin so joint 1 stays in
// its limits where possible.
double fit_base(double deg, const JointLimit& lim) {
  if (in_limit(lim, deg)) return deg;
  const double twin = wrap_deg(deg + 180.0);
  return in_limit(lim, twin) ? twin : deg;
}

}  // namespace

DhTable::DhTable(const LinkLengths& lengths, const std::array<JointLimit, kJoints>& limits)
    : lengths_(lengths), limits_(limits) {
  for (double l : {lengths.l1, lengths.l2, lengths.l3, lengths.l4}) {
    if (!std::isfinite(l) || l < 0.0) throw DomainError("link lengths must be finite and non-negative");
  }
  if (!(lengths.l1 > 0.0)) throw DomainError("L1 must be positive");
  for (const JointLimit& lim : limits) {
    if (!(lim.min_deg <= lim.max_deg)) throw DomainError("joint limit min exceeds max");
  }
  rows_ = {{
      {0.0, 0.0, lengths.l1, 0.0, true},
      {-90.0, 0.0, 0.0, -90.0, true},
      {0.0, lengths.l2, 0.0, 0.0, true},
      {0.0, lengths.l3, 0.0, 0.0, true},
      {-90.0, 0.0, 0.0, 0.0, true},
      {0.0, 0.0, lengths.l4, 0.0, false},
  }};
}

std::array<JointLimit, kJoints> DhTable::default_limits() {
  std::array<JointLimit, kJoints> lim{};
  lim[5] = {0.0, 0.0};
  return lim;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = position;
  return m;
}

Eigen::Matrix4d dh_transform(const DhRow& row, double theta_deg) {
  const double al = to_rad(row.alpha_prev_deg);
  const double th = to_rad((row.theta_is_variable ? theta_deg : 0.0) + row.theta_offset_deg);
  const double ca = std::cos(al), sa = std::sin(al);
  const double ct = std::cos(th), st = std::sin(th);
  Eigen::Matrix4d t;
  t << ct, -st, 0.0, row.a_prev_mm,
       st * ca, ct * ca, -sa, -sa * row.d_mm,
       st * sa, ct * sa, ca, ca * row.d_mm,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

Pose fk(const DhTable& table, const JointAngles& q) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (std::size_t i = 0; i < kJoints; ++i) t = t * dh_transform(table.rows()[i], q[i]);
  Pose p;
  p.rotation = t.topLeftCorner<3, 3>();
  p.position = t.topRightCorner<3, 1>();
  return p;
}

double orthonormality_error(const Eigen::Matrix3d& r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
}

IkSolution ik(const DhTable& table, const Pose& target, const JointAngles& hint) {
  const LinkLengths& L = table.lengths();
  if (!(L.l2 > 0.0 && L.l3 > 0.0)) throw DomainError("inverse kinematics needs L2 > 0 and L3 > 0");
  const Eigen::Matrix3d& R = target.rotation;
  if (!R.allFinite() || !target.position.allFinite()) throw DomainError("target pose is not finite");
  if (orthonormality_error(R) > kOrthoTol || R.determinant() < 0.0) {
    throw DomainError("target rotation is not orthonormal");
  }

  const double px = target.position.x(), py = target.position.y(), pz = target.position.z();
  const double ax = R(0, 2), ay = R(1, 2), az = R(2, 2);

  double t1 = hint[0];
  if (std::hypot(px, py) > kAxisEps) {
    t1 = fit_base(to_deg(std::atan2(py, px)), table.limits()[0]);
  } else if (std::hypot(ax, ay) > 1e-12) {
    t1 = fit_base(to_deg(std::atan2(ay, ax)), table.limits()[0]);
  }
  const double c1 = std::cos(to_rad(t1)), s1 = std::sin(to_rad(t1));

  const double c234 = c1 * ax + s1 * ay;
  const double s234 = -az;
  const double t234 = std::atan2(s234, c234);

  const double u = c1 * px + s1 * py - L.l4 * c234;
  const double v = pz - L.l1 + L.l4 * s234;
  double c3 = (u * u + v * v - L.l2 * L.l2 - L.l3 * L.l3) / (2.0 * L.l2 * L.l3);

  IkSolution sol;
  if (std::abs(c3) > 1.0 + 1e-9) return sol;
  c3 = std::clamp(c3, -1.0, 1.0);
  sol.reachable = true;

  // The rotation only depends on t1, t234 and t5, so t5 is the residual
  // rotation about the tool axis once the t5 = 0 frame is removed.
  JointAngles base_only;
  base_only[0] = t1;
  base_only[1] = to_deg(t234);
  const Eigen::Matrix3d residual = fk(table, base_only).rotation.transpose() * R;
  const double t5 = to_deg(std::atan2(residual(1, 0), residual(0, 0)));

  auto branch = [&](double s3) {
    const double k1 = L.l2 + L.l3 * c3;
    const double k2 = L.l3 * s3;
    const double t2 = std::atan2(k1 * u - k2 * v, k1 * v + k2 * u);
    const double t3 = std::atan2(s3, c3);
    JointAngles q;
    q[0] = t1;
    q[1] = wrap_deg(to_deg(t2));
    q[2] = wrap_deg(to_deg(t3));
    q[3] = wrap_deg(to_deg(t234 - t2 - t3));
    q[4] = wrap_deg(t5);
    q[5] = 0.0;
    return q;
  };
  const double s3 = std::sqrt(1.0 - c3 * c3);
  sol.elbow_up = branch(s3);
  sol.elbow_down = branch(-s3);
  return sol;
}

JointAngles select_branch(const IkSolution& sol, const JointAngles& current) {
  if (!sol.reachable) throw DomainError("target unreachable");
  double up = 0.0, down = 0.0;
  for (std::size_t i = 0; i < kJoints; ++i) {
    up += std::abs(sol.elbow_up[i] - current[i]);
    down += std::abs(sol.elbow_down[i] - current[i]);
  }
  return down < up ? sol.elbow_down : sol.elbow_up;
}

bool within_limits(const DhTable& table, const JointAngles& q, double tol_deg) {
  for (std::size_t i = 0; i < kJoints; ++i) {
    const JointLimit& lim = table.limits()[i];
    if (q[i] < lim.min_deg - tol_deg || q[i] > lim.max_deg + tol_deg) return false;
  }
  return true;
}

std::string format_angles(const JointAngles& q) {
  std::string out;
  for (std::size_t i = 0; i < kJoints; ++i) {
    if (i) out += ' ';
    out += text::format_double(q[i] == 0.0 ? 0.0 : q[i]);
  }
  return out;
}

std::string format_pose(const Pose& p) {
  auto fmt = [](double v) { return text::format_double(v == 0.0 ? 0.0 : v); };
  std::string out = fmt(p.position.x()) + " " + fmt(p.position.y()) + " " + fmt(p.position.z()) + "\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r || c) out += ' ';
      out += fmt(p.rotation(r, c));
    }
  }
  return out;
}

}  // namespace bciarm::kin
