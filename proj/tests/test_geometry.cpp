#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mono3d/geometry.hpp"
#include "support/oracles.hpp"

using namespace mono3d;

namespace {
constexpr double kDeg = M_PI / 180.0;

Box3D make_box(const Vec3& center, double h, double w, double l, double yaw) {
  Box3D b;
  b.center = center;
  b.h = h;
  b.w = w;
  b.l = l;
  b.heading = Heading::yaw_only(yaw);
  return b;
}
}  // namespace

TEST_CASE("normalize_angle maps into (-pi, pi]") {
  CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
  CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(normalize_angle(-7 * M_PI) == doctest::Approx(M_PI));
  CHECK_THROWS_AS(normalize_angle(std::nan("")), InvalidAngle);
}

TEST_CASE("rot_axis identity and quarter turn") {
  CHECK(rot_axis(Axis::X, 0.0).is_identity(1e-15));

  // (y, pi/2) maps unit-z to unit-x.
  const Vec3 v = rot_axis(Axis::Y, M_PI / 2) * Vec3::UnitZ();
  CHECK(std::abs(v.x() - 1.0) <= 1e-12);
  CHECK(std::abs(v.y()) <= 1e-12);
  CHECK(std::abs(v.z()) <= 1e-12);
}

TEST_CASE("rot_axis z matches a separately coded trigonometric expansion") {
  const double t = 3.0 * kDeg;
  const RotationMatrix r = rot_axis(Axis::Z, t);
  CHECK(r.matrix()(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-15));
  CHECK(oracle::max_abs_diff(oracle::rot_z(t), r.matrix()) <= 1e-12);
  CHECK(oracle::max_abs_diff(oracle::rot_x(t), rot_axis(Axis::X, t).matrix()) <= 1e-12);
  CHECK(oracle::max_abs_diff(oracle::rot_y(t), rot_axis(Axis::Y, t).matrix()) <= 1e-12);
}

TEST_CASE("rot_axis rejects non-finite angles") {
  CHECK_THROWS_AS(rot_axis(Axis::X, std::numeric_limits<double>::infinity()),
                  InvalidAngle);
}

TEST_CASE("compose_r3d examples") {
  CHECK(compose_r3d(0, 0, 0).is_identity(1e-15));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i) {
    const double t = u(rng);
    const RotationMatrix a = compose_r3d(0, t, 0);
    const RotationMatrix b = rot_axis(Axis::Y, t);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
  }

  // (2deg, 10deg, 3deg) against an independent raw-array triple product.
  const double roll = 2 * kDeg, yaw = 10 * kDeg, pitch = 3 * kDeg;
  const auto expect =
      oracle::mat_mul(oracle::rot_z(roll), oracle::mat_mul(oracle::rot_y(yaw), oracle::rot_x(pitch)));
  CHECK(oracle::max_abs_diff(expect, compose_r3d(roll, yaw, pitch).matrix()) <= 1e-12);
}

TEST_CASE("rotation group laws on random angles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4 * M_PI, 4 * M_PI);
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    const Axis axis = static_cast<Axis>(i % 3);
    const RotationMatrix p = rot_axis(axis, t) * rot_axis(axis, -t);
    CHECK(p.is_identity(1e-12));
  }
}

TEST_CASE("every produced rotation is orthonormal with unit determinant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 1000; ++i) {
    const RotationMatrix r = compose_r3d(u(rng), u(rng), u(rng));
    const Mat3& m = r.matrix();
    CHECK((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(m.determinant() - 1.0) <= 1e-12);
    CHECK_NOTHROW(RotationMatrix::from_matrix(m));
  }
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(RotationMatrix::from_matrix(bad), InvalidRotation);
}

TEST_CASE("project examples") {
  const CameraIntrinsics k(700, 700, 600, 180, 1280, 375);
  const Vec2 p0 = project(k, Vec3(0, 0, 10));
  CHECK(p0.x() == doctest::Approx(600.0));
  CHECK(p0.y() == doctest::Approx(180.0));

  const Vec2 p1 = project(k, Vec3(1, 0, 10));
  CHECK(p1.x() == doctest::Approx(670.0));
  CHECK(p1.y() == doctest::Approx(180.0));

  // hand arithmetic: u = 700*0.5/5 + 600, v = 700*(-0.25)/5 + 180
  const Vec2 p2 = project(k, Vec3(0.5, -0.25, 5));
  CHECK(p2.x() == doctest::Approx(700.0 * 0.1 + 600.0).epsilon(1e-12));
  CHECK(p2.y() == doctest::Approx(700.0 * -0.05 + 180.0).epsilon(1e-12));

  CHECK_THROWS_AS(project(k, Vec3(0, 0, 0)), BehindCamera);
  CHECK_THROWS_AS(project(k, Vec3(0, 0, -3)), BehindCamera);
}

TEST_CASE("backproject_center examples and round trip") {
  const CameraIntrinsics k(721.5, 721.5, 604.1, 180.5, 1280, 375);
  const Vec3 c = backproject_center(k, Vec2(k.cx, k.cy), 7.0);
  CHECK(c.x() == doctest::Approx(0.0));
  CHECK(c.y() == doctest::Approx(0.0));
  CHECK(c.z() == doctest::Approx(7.0));

  // Independent K^-1 solve: K c = depth * [px; 1].
  const Vec2 px(700, 200);
  const double depth = 15.0;
  const Vec3 got = backproject_center(k, px, depth);
  const oracle::M33 km = {{{k.fx, 0, k.cx}, {0, k.fy, k.cy}, {0, 0, 1}}};
  const oracle::V3 rhs = {depth * px.x(), depth * px.y(), depth};
  const oracle::V3 want = oracle::solve3(km, rhs);
  CHECK(std::abs(got.x() - want[0]) <= 1e-9);
  CHECK(std::abs(got.y() - want[1]) <= 1e-9);
  CHECK(std::abs(got.z() - want[2]) <= 1e-9);

  CHECK_THROWS_AS(backproject_center(k, px, 0.0), InvalidDepth);
  CHECK_THROWS_AS(backproject_center(k, px, -2.0), InvalidDepth);
}

TEST_CASE("project/backproject round trip over random in-bounds pixels") {
  const CameraIntrinsics k(721.5377, 721.5377, 609.5593, 172.854, 1280, 375);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0, 1279.0), uy(0, 374.0), ud(0.1, 200.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 px(ux(rng), uy(rng));
    const double d = ud(rng);
    const Vec2 back = project(k, backproject_center(k, px, d));
    CHECK(std::abs(back.x() - px.x()) <= 1e-9);
    CHECK(std::abs(back.y() - px.y()) <= 1e-9);
  }
}

TEST_CASE("corners_yaw_only axis-aligned example") {
  const Box3D box = make_box(Vec3(0, 0, 10), 2, 2, 4, 0.0);
  const BoxCorners c = corners_yaw_only(box);
  for (const auto& p : c.corners) {
    CHECK(std::abs(std::abs(p.x()) - 2.0) <= 1e-12);
    CHECK(std::abs(std::abs(p.y()) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(p.z() - 10.0) - 1.0) <= 1e-12);
  }
  // Fixed enumeration: first corner is (+l/2, +h/2, +w/2).
  CHECK(c.corners[0].isApprox(Vec3(2, 1, 11), 1e-12));
  CHECK(c.corners[5].isApprox(Vec3(2, -1, 9), 1e-12));
}

TEST_CASE("yaw pi reproduces the corner set (cuboid half-turn symmetry)") {
  const Box3D a = make_box(Vec3(1, 2, 15), 1.5, 1.7, 4.2, 0.4);
  Box3D b = a;
  b.heading = Heading::yaw_only(0.4 + M_PI);
  const BoxCorners ca = corners_yaw_only(a);
  const BoxCorners cb = corners_yaw_only(b);
  // Set equality: every corner of b matches some corner of a.
  for (const auto& p : cb.corners) {
    double best = 1e18;
    for (const auto& q : ca.corners) best = std::min(best, (p - q).norm());
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("corners_yaw_only against per-corner oracle") {
  const double yaw = 30 * kDeg;
  const Box3D box = make_box(Vec3(2, 1, 20), 1.5, 1.6, 3.9, yaw);
  const BoxCorners got = corners_yaw_only(box);
  const auto r = oracle::rot_y(yaw);
  int idx = 0;
  for (double sy : {1.0, -1.0}) {
    const double sx[4] = {1, 1, -1, -1};
    const double sz[4] = {1, -1, -1, 1};
    for (int i = 0; i < 4; ++i, ++idx) {
      const oracle::V3 off = {sx[i] * 3.9 / 2, sy * 1.5 / 2, sz[i] * 1.6 / 2};
      const oracle::V3 rot = oracle::mat_vec(r, off);
      CHECK(std::abs(got.corners[idx].x() - (rot[0] + 2)) <= 1e-12);
      CHECK(std::abs(got.corners[idx].y() - (rot[1] + 1)) <= 1e-12);
      CHECK(std::abs(got.corners[idx].z() - (rot[2] + 20)) <= 1e-12);
    }
  }
}

TEST_CASE("corners_yaw_only rejects bad dims") {
  CHECK_THROWS_AS(corners_yaw_only(make_box(Vec3(0, 0, 5), 0, 1, 1, 0)), InvalidDims);
  CHECK_THROWS_AS(corners_yaw_only(make_box(Vec3(0, 0, 5), 1, -1, 1, 0)), InvalidDims);
}

TEST_CASE("corners_compensated reduces exactly to corners_yaw_only at zero") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-M_PI, M_PI), c(-10, 10), d(0.5, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Box3D box = make_box(Vec3(c(rng), c(rng), 10 + std::abs(c(rng))), d(rng),
                               d(rng), d(rng), u(rng));
    const BoxCorners a = corners_yaw_only(box);
    const BoxCorners b = corners_compensated(box, 0.0, 0.0);
    for (int k = 0; k < 8; ++k) CHECK((a.corners[k] - b.corners[k]).norm() == 0.0);
  }
}

TEST_CASE("corners_compensated pitch tilt against per-corner oracle") {
  const double pitch = 5 * kDeg;
  const Box3D box = make_box(Vec3(0.5, 0.2, 12), 1.5, 1.7, 4.0, 0.0);
  const BoxCorners got = corners_compensated(box, 0.0, pitch);
  const auto r = oracle::rot_x(pitch);  // yaw 0, roll 0
  const auto offs = corner_offsets(1.5, 1.7, 4.0);
  for (int i = 0; i < 8; ++i) {
    const oracle::V3 off = {offs[i].x(), offs[i].y(), offs[i].z()};
    const oracle::V3 rot = oracle::mat_vec(r, off);
    CHECK(std::abs(got.corners[i].x() - (rot[0] + 0.5)) <= 1e-12);
    CHECK(std::abs(got.corners[i].y() - (rot[1] + 0.2)) <= 1e-12);
    CHECK(std::abs(got.corners[i].z() - (rot[2] + 12)) <= 1e-12);
  }
}

TEST_CASE("corners_compensated equals independent rotate-then-translate pipeline") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-M_PI, M_PI), ang(-0.3, 0.3), c(-8, 8),
      d(0.5, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double roll = ang(rng), pitch = ang(rng), yaw = u(rng);
    const Box3D box = make_box(Vec3(c(rng), c(rng), 10 + std::abs(c(rng))), d(rng),
                               d(rng), d(rng), yaw);
    const BoxCorners got = corners_compensated(box, roll, pitch);
    const auto rm = oracle::mat_mul(
        oracle::rot_z(roll), oracle::mat_mul(oracle::rot_y(yaw), oracle::rot_x(pitch)));
    const auto offs = corner_offsets(box.h, box.w, box.l);
    for (int k = 0; k < 8; ++k) {
      const oracle::V3 rot =
          oracle::mat_vec(rm, {offs[k].x(), offs[k].y(), offs[k].z()});
      const Vec3 want = Vec3(rot[0], rot[1], rot[2]) + box.center;
      CHECK((got.corners[k] - want).norm() <= 1e-12);
    }
  }
}

TEST_CASE("box corner invariants: midpoints, edge lengths") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-M_PI, M_PI), ang(-0.2, 0.2), c(-8, 8),
      d(0.5, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double h = d(rng), w = d(rng), l = d(rng);
    Box3D box = make_box(Vec3(c(rng), c(rng), 10 + std::abs(c(rng))), h, w, l, u(rng));
    const BoxCorners corners = (i % 2 == 0)
                                   ? corners_yaw_only(box)
                                   : corners_compensated(box, ang(rng), ang(rng));
    // Opposite corners: (0,6), (1,7), (2,4), (3,5).
    const int opp[4][2] = {{0, 6}, {1, 7}, {2, 4}, {3, 5}};
    for (const auto& pair : opp) {
      const Vec3 mid = (corners.corners[pair[0]] + corners.corners[pair[1]]) / 2.0;
      CHECK((mid - box.center).norm() <= 1e-9);
    }
    // Edges from corner 0: width (0-1), length (0-3), height (0-4).
    std::array<double, 3> got = {(corners.corners[0] - corners.corners[1]).norm(),
                                 (corners.corners[0] - corners.corners[3]).norm(),
                                 (corners.corners[0] - corners.corners[4]).norm()};
    std::array<double, 3> want = {w, l, h};
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-9);
  }
}

TEST_CASE("transform_box identity and pure translation") {
  const Box3D box = make_box(Vec3(1, 1.2, 18), 1.5, 1.7, 4.1, 0.7);
  const Box3D same = transform_box(box, RigidPose{});
  CHECK((same.center - box.center).norm() == 0.0);
  CHECK(same.h == box.h);

  RigidPose shift;
  shift.translation = Vec3(0, 0.5, 0);
  const Box3D moved = transform_box(box, shift);
  CHECK((moved.center - (box.center + Vec3(0, 0.5, 0))).norm() == 0.0);
  CHECK(moved.h == box.h);
  CHECK(moved.w == box.w);
  CHECK(moved.l == box.l);
  // Heading untouched by translation.
  CHECK((moved.heading.matrix().matrix() - box.heading.matrix().matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("transform_box yaw closure under y-rotations") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 100; ++i) {
    const double phi = u(rng), theta = u(rng);
    const Box3D box = make_box(Vec3(2, 1, 15), 1.5, 1.6, 4.0, phi);
    RigidPose pose;
    pose.rotation = rot_axis(Axis::Y, theta);
    const Box3D moved = transform_box(box, pose);
    const Mat3 want = rot_axis(Axis::Y, theta + phi).matrix();
    CHECK((moved.heading.matrix().matrix() - want).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("transform_box inverse round trip") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-M_PI, M_PI), t(-3, 3), c(-8, 8), d(0.5, 4);
  for (int i = 0; i < 1000; ++i) {
    const Box3D box =
        make_box(Vec3(c(rng), c(rng), 10 + std::abs(c(rng))), d(rng), d(rng), d(rng), u(rng));
    RigidPose pose;
    pose.rotation = compose_r3d(u(rng), u(rng), u(rng));
    pose.translation = Vec3(t(rng), t(rng), t(rng));
    const Box3D back = transform_box(transform_box(box, pose), pose.inverse());
    CHECK((back.center - box.center).norm() <= 1e-9);
    CHECK((back.heading.matrix().matrix() - box.heading.matrix().matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    // Pose composed with its inverse is the identity.
    CHECK(pose.compose(pose.inverse()).is_identity(1e-9));
  }
}

TEST_CASE("kitti location/center conversions") {
  const Vec3 c0 = kitti_location_to_center(Vec3(0, 1.0, 10), 2.0);
  CHECK(c0.isApprox(Vec3(0, 0, 10), 1e-15));

  const Vec3 loc(3.2, 1.65, 22.1);
  const Vec3 c1 = kitti_location_to_center(loc, 1.48);
  CHECK(c1.x() == doctest::Approx(3.2));
  CHECK(c1.y() == doctest::Approx(0.91));
  CHECK(c1.z() == doctest::Approx(22.1));

  // round trip is exact
  CHECK((kitti_center_to_location(c1, 1.48) - loc).norm() == 0.0);
}

TEST_CASE("extract_yaw recovers yaw-only headings") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng);
    CHECK(std::abs(extract_yaw(rot_axis(Axis::Y, t)) - t) <= 1e-12);
  }
}
