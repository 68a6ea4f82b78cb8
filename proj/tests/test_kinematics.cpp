#include <cmath>

#include "bciarm/error.hpp"
#include "bciarm/kinematics/kinematics.hpp"
#include "bciarm/text.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bciarm;
using namespace bciarm::kin;

namespace {

double wrap(double deg) {
  double w = std::remainder(deg, 360.0);
  return w <= -180.0 ? w + 360.0 : w;
}

double angle_gap(const JointAngles& a, const JointAngles& b) {
  double worst = 0;
  for (std::size_t i = 0; i < kJoints; ++i) worst = std::max(worst, std::abs(wrap(a[i] - b[i])));
  return worst;
}

double travel(const JointAngles& a, const JointAngles& b) {
  double t = 0;
  for (std::size_t i = 0; i < kJoints; ++i) t += std::abs(a[i] - b[i]);
  return t;
}

double pose_position_error(const Pose& a, const Pose& b) { return (a.position - b.position).norm(); }
double pose_rotation_error(const Pose& a, const Pose& b) { return (a.rotation - b.rotation).norm(); }

JointAngles angles(double t1, double t2, double t3, double t4, double t5) {
  JointAngles q;
  q.theta = {t1, t2, t3, t4, t5, 0.0};
  return q;
}

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("table rows follow the DH layout") {
  const DhTable t(LinkLengths{});
  CHECK(t.rows()[0].d_mm == 100);
  CHECK(t.rows()[1].alpha_prev_deg == -90);
  CHECK(t.rows()[1].theta_offset_deg == -90);
  CHECK(t.rows()[2].a_prev_mm == 105);
  CHECK(t.rows()[3].a_prev_mm == 100);
  CHECK(t.rows()[4].alpha_prev_deg == -90);
  CHECK(t.rows()[5].d_mm == 60);
  CHECK_FALSE(t.rows()[5].theta_is_variable);
  CHECK_THROWS_AS(DhTable(LinkLengths{0, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(DhTable(LinkLengths{1, -1, 1, 1}), DomainError);
}

TEST_CASE("zero L2..L4 pins the tool at (0, 0, L1)") {
  const DhTable t(LinkLengths{100, 0, 0, 0});
  oracle::Gen g(1);
  for (int i = 0; i < 100; ++i) {
    const Pose p = fk(t, angles(g.uniform(-180, 180), g.uniform(-180, 180), g.uniform(-180, 180),
                                g.uniform(-180, 180), g.uniform(-180, 180)));
    CHECK(std::abs(p.position.x()) < 1e-12);
    CHECK(std::abs(p.position.y()) < 1e-12);
    CHECK(p.position.z() == doctest::Approx(100.0).epsilon(1e-15));
  }
}

TEST_CASE("a base sweep rotates the position rigidly about z") {
  const DhTable t(LinkLengths{});
  const Pose ref = fk(t, angles(0, 25, -40, 15, 30));
  const double r = std::hypot(ref.position.x(), ref.position.y());
  for (double t1 = -180; t1 <= 180; t1 += 7.5) {
    const Pose p = fk(t, angles(t1, 25, -40, 15, 30));
    CHECK(std::abs(p.position.z() - ref.position.z()) < 1e-9);
    CHECK(std::abs(std::hypot(p.position.x(), p.position.y()) - r) < 1e-9);
    const double phi = std::atan2(p.position.y(), p.position.x()) * 180.0 / std::numbers::pi;
    CHECK(std::abs(wrap(phi - t1)) < 1e-9);
  }
}

TEST_CASE("forward kinematics at reference configurations") {
  const DhTable t(LinkLengths{});
  // numpy matrix-chain reference values, frozen.
  SUBCASE("upper arm horizontal") {
    const Pose p = fk(t, angles(0, 90, 0, 0, 0));
    CHECK(std::abs(p.position.x() - 205.0) < 1e-9);
    CHECK(std::abs(p.position.y()) < 1e-9);
    CHECK(std::abs(p.position.z() - 40.0) < 1e-9);
    Eigen::Matrix3d want;
    want << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    CHECK((p.rotation - want).norm() < 1e-12);
  }
  SUBCASE("general pose") {
    const Pose p = fk(t, angles(30, -20, 45, 10, 60));
    Eigen::Matrix4d want;
    want << 6.8137858433829634e-01, -1.8018232726328456e-01, 7.0940647991622252e-01, 4.8063399935807539e+01,
        -6.0660589091223849e-01, -6.8137858433829634e-01, 4.0957602214449595e-01, 2.7749416891107110e+01,
        4.0957602214449590e-01, -7.0940647991622241e-01, -5.7357643635104605e-01, 2.5488391770512260e+02, 0, 0, 0,
        1;
    CHECK((p.matrix() - want).norm() < 1e-9);
  }
}

TEST_CASE("fk agrees with the elementary chain and the A/B shorthand") {
  oracle::Gen g(2);
  const LinkLengths L{};
  const DhTable t(L);
  for (int i = 0; i < 2000; ++i) {
    const JointAngles q = angles(g.uniform(-180, 180), g.uniform(-180, 180), g.uniform(-180, 180),
                                 g.uniform(-180, 180), g.uniform(-180, 180));
    const Pose p = fk(t, q);
    CHECK((p.matrix() - oracle::fk_chain(L, q)).norm() < 1e-9);
    CHECK((p.position - oracle::fk_ab(L, q)).norm() < 1e-9);
    CHECK(orthonormality_error(p.rotation) < 1e-9);
    CHECK(std::abs(p.rotation.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("fk is continuous") {
  oracle::Gen g(3);
  const DhTable t(LinkLengths{});
  for (int i = 0; i < 200; ++i) {
    const JointAngles q = g.angles(t);
    const Pose p = fk(t, q);
    for (std::size_t j = 0; j < 5; ++j) {
      JointAngles d = q;
      d[j] += 1e-6;
      CHECK(pose_position_error(fk(t, d), p) < 1e-3);
    }
  }
}

TEST_CASE("ik recovers random in-limit joint angles") {
  oracle::Gen g(4);
  const DhTable t(LinkLengths{});
  for (int i = 0; i < 1000; ++i) {
    const JointAngles q = g.angles(t);
    const Pose target = fk(t, q);
    const IkSolution sol = ik(t, target);
    REQUIRE(sol.reachable);
    const double gap = std::min(angle_gap(sol.elbow_up, q), angle_gap(sol.elbow_down, q));
    CHECK(gap < 1e-6);
    for (const JointAngles& b : {sol.elbow_up, sol.elbow_down}) {
      const Pose back = fk(t, b);
      CHECK(pose_position_error(back, target) < 1e-6);
      CHECK(pose_rotation_error(back, target) < 1e-8);
    }
  }
}

TEST_CASE("wrist pitch closes the sum of the planar angles") {
  const DhTable t(LinkLengths{});
  const IkSolution sol = ik(t, fk(t, angles(0, 30, 20, 40, 0)));
  REQUIRE(sol.reachable);
  const JointAngles& b = std::abs(sol.elbow_up[2] - 20) < 1e-6 ? sol.elbow_up : sol.elbow_down;
  CHECK(b[1] == doctest::Approx(30).epsilon(1e-9));
  CHECK(b[2] == doctest::Approx(20).epsilon(1e-9));
  CHECK(b[3] == doctest::Approx(40).epsilon(1e-9));
  CHECK(b[1] + b[2] + b[3] == doctest::Approx(90).epsilon(1e-9));
}

TEST_CASE("overextended targets are unreachable") {
  const DhTable t(LinkLengths{});
  Pose target = fk(t, angles(10, 20, 30, 40, 50));
  target.position *= 3.0;
  CHECK_FALSE(ik(t, target).reachable);

  // Straight up and a hair beyond full extension.
  Pose up = fk(t, angles(0, 0, 0, 0, 0));
  up.position.z() += 1e-3;
  CHECK_FALSE(ik(t, up).reachable);
  up.position.z() -= 1e-3;
  CHECK(ik(t, up).reachable);
}

TEST_CASE("ik rejects non-orthonormal rotations") {
  const DhTable t(LinkLengths{});
  Pose p = fk(t, angles(10, 20, 30, 40, 50));
  p.rotation(0, 0) += 1e-3;
  CHECK_THROWS_AS(ik(t, p), DomainError);
  Pose mirrored = fk(t, angles(10, 20, 30, 40, 50));
  mirrored.rotation.col(0) *= -1.0;
  CHECK_THROWS_AS(ik(t, mirrored), DomainError);
}

TEST_CASE("on the base axis ik keeps the caller's base angle") {
  const DhTable t(LinkLengths{});
  // Upper arm and forearm vertical, wrist pitched 90 deg: the tool points
  // straight up over the base, so only t1 + t5 is determined.
  const JointAngles q = angles(37, 0, 0, 90, 10);
  const Pose target = fk(t, q);
  REQUIRE(std::hypot(target.position.x(), target.position.y()) < 1e-9);
  JointAngles hint;
  hint[0] = 37;
  const IkSolution sol = ik(t, target, hint);
  REQUIRE(sol.reachable);
  CHECK(sol.elbow_up[0] == 37);
  for (const JointAngles& b : {sol.elbow_up, sol.elbow_down}) {
    CHECK(pose_position_error(fk(t, b), target) < 1e-6);
    CHECK(pose_rotation_error(fk(t, b), target) < 1e-8);
  }
  hint[0] = -20;
  const IkSolution other = ik(t, target, hint);
  CHECK(other.elbow_up[0] == -20);
  CHECK(pose_rotation_error(fk(t, other.elbow_up), target) < 1e-8);
}

TEST_CASE("branch selection") {
  const DhTable t(LinkLengths{});
  const IkSolution sol = ik(t, fk(t, angles(10, 20, 30, -20, 5)));
  REQUIRE(sol.reachable);
  CHECK(select_branch(sol, sol.elbow_up) == sol.elbow_up);
  CHECK(select_branch(sol, sol.elbow_down) == sol.elbow_down);

  IkSolution tie;
  tie.reachable = true;
  tie.elbow_up = angles(0, 10, 0, 0, 0);
  tie.elbow_down = angles(0, -10, 0, 0, 0);
  CHECK(select_branch(tie, JointAngles{}) == tie.elbow_up);

  CHECK_THROWS_AS(select_branch(IkSolution{}, JointAngles{}), DomainError);

  oracle::Gen g(5);
  for (int i = 0; i < 500; ++i) {
    const IkSolution s = ik(t, fk(t, g.angles(t)));
    const JointAngles cur = g.angles(t);
    const JointAngles pick = select_branch(s, cur);
    const JointAngles& other = pick == s.elbow_up ? s.elbow_down : s.elbow_up;
    CHECK(travel(pick, cur) <= travel(other, cur));
  }
}

TEST_CASE("plain-text forms round-trip") {
  const DhTable t(LinkLengths{});
  const JointAngles q = angles(12.5, -33.25, 71, 0.1, -179);
  const std::string a = format_angles(q);
  std::vector<double> parsed;
  for (auto part : text::split(a, ' ')) parsed.push_back(*text::parse_double(part));
  REQUIRE(parsed.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(parsed[i] == q[i]);

  const std::string p = format_pose(fk(t, q));
  CHECK(std::count(p.begin(), p.end(), '\n') == 1);
}

}  // TEST_SUITE
