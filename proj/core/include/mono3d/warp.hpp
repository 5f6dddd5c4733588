#pragma once

#include "mono3d/geometry.hpp"
#include "mono3d/image.hpp"

namespace mono3d {

struct WarpReport {
  double valid_fraction = 0.0;     // 1 - holes/total, before filling
  std::size_t holes_filled = 0;    // hole pixels a later fill_holes will touch
  std::size_t depth_rejected = 0;  // source pixels with invalid depth
};

struct WarpResult {
  ImageBuffer image;
  HoleMask mask;
  WarpReport report;
};

// Forward-splatting view synthesis: every source pixel with valid depth is
// lifted by K^-1, mapped through [R|t], re-projected and splatted to the
// nearest target pixel; the smallest post-transform depth wins (z-buffer,
// scan-order stable on ties). Untouched target pixels are marked as holes.
WarpResult synthesize_view(const ImageBuffer& img, const DepthRaster& depth,
                           const CameraIntrinsics& k, const RigidPose& pose);

// Centered crop, left/top biased on odd margins.
ImageBuffer crop_center(const ImageBuffer& img, int target_w, int target_h);
HoleMask crop_center(const HoleMask& mask, int target_w, int target_h);

// Principal point shifted by the crop offsets; extent set to the target.
CameraIntrinsics crop_intrinsics(const CameraIntrinsics& k, int target_w, int target_h);

// floor((src - target)/2) for both axes, the offsets crop_center uses.
std::pair<int, int> crop_offsets(int src_w, int src_h, int target_w, int target_h);

// Iterative 4-neighbor dilation; each masked pixel takes its first unmasked
// neighbor in order up, left, right, down, rounds synchronized. Idempotent;
// unmasked pixels never change.
ImageBuffer fill_holes(const ImageBuffer& img, const HoleMask& mask);

}  // namespace mono3d
