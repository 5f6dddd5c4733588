#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mono3d/error.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/image.hpp"

namespace mono3d {

// One KITTI label line. location is the bottom-face center in the camera
// frame; use kitti_location_to_center for geometry.
struct LabelRecord {
  std::string class_name;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  double left = 0, top = 0, right = 0, bottom = 0;  // bbox2d, pixels
  double h = 0, w = 0, l = 0;                       // meters
  Vec3 location = Vec3::Zero();                     // bottom-face center
  double rotation_y = 0.0;
  std::optional<double> score;

  bool is_dont_care() const { return class_name == "DontCare"; }
  double bbox_height() const { return bottom - top; }
};

// 15 or 16 whitespace-separated fields after the class token; the 16th is
// the detection score. line_number only feeds error messages.
LabelRecord parse_label_line(const std::string& line, int line_number = 0);
std::string serialize_label_line(const LabelRecord& rec);

// One record per non-empty line.
std::vector<LabelRecord> parse_label_file(const std::string& text);
std::string serialize_label_file(const std::vector<LabelRecord>& recs);

struct CalibData {
  Eigen::Matrix<double, 3, 4> p2;
  double fx = 0, fy = 0, cx = 0, cy = 0;

  // KITTI calib files carry no image extent; callers supply it (defaults to
  // the full KITTI resolution).
  CameraIntrinsics intrinsics(int width = 1280, int height = 375) const {
    return CameraIntrinsics(fx, fy, cx, cy, width, height);
  }
};

// Needs a "P2:" line followed by 12 numerics, bound row-major.
CalibData parse_calib(const std::string& text);

// PFM, grayscale ("Pf") only. Scale-line sign encodes endianness; rows are
// stored bottom-to-top on disk and top-down in memory.
DepthRaster read_pfm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pfm(const DepthRaster& raster);

// Binary PPM ("P6"), maxval 255.
ImageBuffer read_ppm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_ppm(const ImageBuffer& image);

// Binary PGM ("P5"), maxval 255. Carrier for hole masks (255 = hole).
HoleMask read_pgm_mask(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pgm_mask(const HoleMask& mask);

// Flat key-value pose document. Keys: roll_deg, pitch_deg, yaw_deg, tx, ty,
// tz; either "key value" or "key: value"; '#' starts a comment. Absent keys
// default to zero.
struct PoseSpec {
  double roll_deg = 0, pitch_deg = 0, yaw_deg = 0;
  double tx = 0, ty = 0, tz = 0;
};

PoseSpec parse_pose_spec(const std::string& text);

// Rotation = compose_r3d(roll, yaw, pitch) from degrees; translation bound
// directly.
RigidPose pose_spec_to_rigid(const PoseSpec& spec);

// Sidecar rotation file: one row-major 3x3 per line, index-aligned with the
// label file. Lossless (%.17g) so full headings round-trip.
std::vector<RotationMatrix> parse_rotation_sidecar(const std::string& text);
std::string serialize_rotation_sidecar(const std::vector<RotationMatrix>& rotations);

// Filesystem helpers shared by the CLI and tests.
std::vector<std::uint8_t> read_binary_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mono3d
