#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "mono3d/error.hpp"

namespace mono3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Axis { X, Y, Z };

// Normalized representative in (-pi, pi].
double normalize_angle(double a);

// Camera-frame Euler triple (radians). roll is about the optical axis (z),
// pitch about x, yaw about y in the gravity-down KITTI camera frame.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  EulerAngles canonical() const {
    return {normalize_angle(roll), normalize_angle(pitch), normalize_angle(yaw)};
  }
};

// Proper orthonormal 3x3 rotation. Checked on entry from raw matrices;
// products of rotations stay within tolerance by construction.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  // Validates orthonormality (1e-9, inf norm) and det(M) in [1-1e-9, 1+1e-9].
  static RotationMatrix from_matrix(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  RotationMatrix inverse() const { return RotationMatrix(m_.transpose()); }

  RotationMatrix operator*(const RotationMatrix& o) const {
    return RotationMatrix(Mat3(m_ * o.m_));
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  bool is_identity(double tol = 1e-9) const {
    return (m_ - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  friend RotationMatrix rot_axis(Axis, double);
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

// Right-handed elementary rotation about the named camera axis.
RotationMatrix rot_axis(Axis axis, double angle);

// R_z(roll_hat) * R_y(yaw) * R_x(pitch_hat), the heading-compensation rotation.
RotationMatrix compose_r3d(double roll_hat, double yaw, double pitch_hat);

// Rigid [R|t]: p' = R p + t.
struct RigidPose {
  RotationMatrix rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidPose inverse() const {
    RotationMatrix rinv = rotation.inverse();
    return {rinv, -(rinv * translation)};
  }
  RigidPose compose(const RigidPose& inner) const {
    // this ∘ inner: p -> this(inner(p))
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }
  bool is_identity(double tol = 1e-9) const {
    return rotation.is_identity(tol) && translation.cwiseAbs().maxCoeff() <= tol;
  }
};

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

  Mat3 k() const {
    Mat3 m;
    m << fx, 0, cx, 0, fy, cy, 0, 0, 1;
    return m;
  }
};

// pi(K X) = [fx X/Z + cx, fy Y/Z + cy]. Throws BehindCamera for Z <= 0.
Vec2 project(const CameraIntrinsics& k, const Vec3& point);

// depth * K^-1 [x, y, 1]^T. Throws InvalidDepth for depth <= 0.
Vec3 backproject_center(const CameraIntrinsics& k, const Vec2& px, double depth);

// Object heading: either a single yaw about camera y, or a full rotation for
// boxes that picked up roll/pitch under a camera pose change.
class Heading {
 public:
  static Heading yaw_only(double yaw) { return Heading(yaw); }
  static Heading full_rotation(const RotationMatrix& r) { return Heading(r); }

  bool is_yaw_only() const { return yaw_only_; }
  double yaw() const;  // valid for yaw-only headings
  RotationMatrix matrix() const {
    return yaw_only_ ? rot_axis(Axis::Y, yaw_) : rot_;
  }

 private:
  explicit Heading(double yaw) : yaw_only_(true), yaw_(yaw) {}
  explicit Heading(const RotationMatrix& r) : yaw_only_(false), rot_(r) {}
  bool yaw_only_;
  double yaw_ = 0.0;
  RotationMatrix rot_;
};

// Geometric-center box. dims are [h, w, l]; pre-rotation the long axis (l)
// lies along x, h along y, w along z.
struct Box3D {
  Vec3 center = Vec3::Zero();
  double h = 0, w = 0, l = 0;
  Heading heading = Heading::yaw_only(0.0);
};

// Eight corners in the fixed enumeration: y=+h/2 first with (x,z) signs
// (+,+), (+,-), (-,-), (-,+), then the same cycle at y=-h/2.
struct BoxCorners {
  std::array<Vec3, 8> corners;

  Vec3 min() const;
  Vec3 max() const;
};

// Signed half-dimension offsets in the fixed corner order (no rotation).
std::array<Vec3, 8> corner_offsets(double h, double w, double l);

// Eq. 3 construction: R_y(r_yaw) * C + X_c.  Box must carry a yaw-only heading.
BoxCorners corners_yaw_only(const Box3D& box);

// Eq. 4 construction: compose_r3d(roll_hat, r_yaw, pitch_hat) * C + X_c.
// Reduces exactly to corners_yaw_only when both angles are zero.
BoxCorners corners_compensated(const Box3D& box, double roll_hat, double pitch_hat);

// heading.matrix() * C + center, for any heading.
BoxCorners box_corners(const Box3D& box);

// Rigid re-expression: center' = R c + t, heading' = R * heading-as-matrix.
Box3D transform_box(const Box3D& box, const RigidPose& pose);

// KITTI stores the bottom-face center; geometry works on the geometric
// center. y points down, so the center sits half a height above location.
Vec3 kitti_location_to_center(const Vec3& location, double h);
Vec3 kitti_center_to_location(const Vec3& center, double h);

// Yaw component of a heading: atan2 of the long-axis direction projected to
// the x-z plane. Recovers r_yaw exactly for yaw-only headings.
double extract_yaw(const RotationMatrix& r);

}  // namespace mono3d
