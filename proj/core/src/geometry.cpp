#include "mono3d/geometry.hpp"

#include <cmath>

namespace mono3d {

double normalize_angle(double a) {
  if (!std::isfinite(a)) throw InvalidAngle("non-finite angle");
  double r = std::fmod(a + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9) throw InvalidRotation("matrix is not orthonormal");
  const double det = m.determinant();
  if (det < 1.0 - 1e-9 || det > 1.0 + 1e-9)
    throw InvalidRotation("matrix is not a proper rotation");
  return RotationMatrix(m);
}

RotationMatrix rot_axis(Axis axis, double angle) {
  if (!std::isfinite(angle)) throw InvalidAngle("non-finite rotation angle");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  switch (axis) {
    case Axis::X:
      m << 1, 0, 0,
           0, c, -s,
           0, s, c;
      break;
    case Axis::Y:
      m << c, 0, s,
           0, 1, 0,
           -s, 0, c;
      break;
    case Axis::Z:
      m << c, -s, 0,
           s, c, 0,
           0, 0, 1;
      break;
  }
  return RotationMatrix(m);
}

RotationMatrix compose_r3d(double roll_hat, double yaw, double pitch_hat) {
  return rot_axis(Axis::Z, roll_hat) * rot_axis(Axis::Y, yaw) * rot_axis(Axis::X, pitch_hat);
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy,
                                   int width, int height)
    : fx(fx), fy(fy), cx(cx), cy(cy), width(width), height(height) {
  if (!(fx > 0) || !(fy > 0)) throw InvalidIntrinsics("focal lengths must be positive");
  if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
    throw InvalidIntrinsics("principal point outside image extent");
}

Vec2 project(const CameraIntrinsics& k, const Vec3& point) {
  if (!(point.z() > 0)) throw BehindCamera("point has non-positive depth");
  return {k.fx * point.x() / point.z() + k.cx,
          k.fy * point.y() / point.z() + k.cy};
}

Vec3 backproject_center(const CameraIntrinsics& k, const Vec2& px, double depth) {
  if (!(depth > 0)) throw InvalidDepth("depth must be positive");
  return {depth * (px.x() - k.cx) / k.fx,
          depth * (px.y() - k.cy) / k.fy,
          depth};
}

double Heading::yaw() const {
  if (!yaw_only_) throw InvalidRotation("heading is a full rotation, not yaw-only");
  return yaw_;
}

Vec3 BoxCorners::min() const {
  Vec3 m = corners[0];
  for (const auto& c : corners) m = m.cwiseMin(c);
  return m;
}

Vec3 BoxCorners::max() const {
  Vec3 m = corners[0];
  for (const auto& c : corners) m = m.cwiseMax(c);
  return m;
}

std::array<Vec3, 8> corner_offsets(double h, double w, double l) {
  if (!(h > 0 && w > 0 && l > 0)) throw InvalidDims("box dimensions must be positive");
  const double sx[4] = {1, 1, -1, -1};
  const double sz[4] = {1, -1, -1, 1};
  std::array<Vec3, 8> out;
  for (int i = 0; i < 4; ++i) out[i] = Vec3(sx[i] * l / 2, h / 2, sz[i] * w / 2);
  for (int i = 0; i < 4; ++i) out[4 + i] = Vec3(sx[i] * l / 2, -h / 2, sz[i] * w / 2);
  return out;
}

static BoxCorners apply_rotation(const Box3D& box, const RotationMatrix& r) {
  const auto offsets = corner_offsets(box.h, box.w, box.l);
  BoxCorners out;
  for (int i = 0; i < 8; ++i) out.corners[i] = r * offsets[i] + box.center;
  return out;
}

BoxCorners corners_yaw_only(const Box3D& box) {
  return apply_rotation(box, rot_axis(Axis::Y, box.heading.yaw()));
}

BoxCorners corners_compensated(const Box3D& box, double roll_hat, double pitch_hat) {
  return apply_rotation(box, compose_r3d(roll_hat, box.heading.yaw(), pitch_hat));
}

BoxCorners box_corners(const Box3D& box) {
  return apply_rotation(box, box.heading.matrix());
}

Box3D transform_box(const Box3D& box, const RigidPose& pose) {
  Box3D out = box;
  out.center = pose.apply(box.center);
  out.heading = Heading::full_rotation(pose.rotation * box.heading.matrix());
  return out;
}

Vec3 kitti_location_to_center(const Vec3& location, double h) {
  if (!(h > 0)) throw InvalidDims("height must be positive");
  return location + Vec3(0, -h / 2, 0);
}

Vec3 kitti_center_to_location(const Vec3& center, double h) {
  if (!(h > 0)) throw InvalidDims("height must be positive");
  return center + Vec3(0, h / 2, 0);
}

double extract_yaw(const RotationMatrix& r) {
  const Vec3 d = r * Vec3::UnitX();
  return std::atan2(-d.z(), d.x());
}

}  // namespace mono3d
