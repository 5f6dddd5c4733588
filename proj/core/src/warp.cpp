#include "mono3d/warp.hpp"

#include <cmath>
#include <limits>

namespace mono3d {

WarpResult synthesize_view(const ImageBuffer& img, const DepthRaster& depth,
                           const CameraIntrinsics& k, const RigidPose& pose) {
  if (img.width != depth.width || img.height != depth.height)
    throw ShapeMismatch("image and depth dimensions differ");
  if (img.width != k.width || img.height != k.height)
    throw ShapeMismatch("intrinsics extent does not match the image");

  const int w = img.width;
  const int h = img.height;
  WarpResult out;
  out.image = ImageBuffer::filled(w, h, 0, 0, 0);
  out.mask.width = w;
  out.mask.height = h;
  out.mask.bits.assign(static_cast<std::size_t>(w) * h, 1);

  std::vector<double> zbuf(static_cast<std::size_t>(w) * h,
                           std::numeric_limits<double>::infinity());

  const Mat3& r = pose.rotation.matrix();
  std::size_t depth_rejected = 0;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float d = depth.at(x, y);
      if (!std::isfinite(d) || d <= 0.0f) {
        ++depth_rejected;
        continue;
      }
      const Vec3 p((x - k.cx) / k.fx * d, (y - k.cy) / k.fy * d, d);
      const Vec3 q = r * p + pose.translation;
      if (!(q.z() > 0)) continue;
      const double u = k.fx * q.x() / q.z() + k.cx;
      const double v = k.fy * q.y() / q.z() + k.cy;
      const long tx = std::lround(u);
      const long ty = std::lround(v);
      if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
      const std::size_t idx = static_cast<std::size_t>(ty) * w + tx;
      if (q.z() < zbuf[idx]) {
        zbuf[idx] = q.z();
        const std::uint8_t* src = img.at(x, y);
        std::uint8_t* dst = out.image.at(static_cast<int>(tx), static_cast<int>(ty));
        dst[0] = src[0];
        dst[1] = src[1];
        dst[2] = src[2];
        out.mask.bits[idx] = 0;
      }
    }
  }

  std::size_t holes = 0;
  for (auto b : out.mask.bits) holes += b;
  const std::size_t total = static_cast<std::size_t>(w) * h;
  out.report.valid_fraction = 1.0 - static_cast<double>(holes) / static_cast<double>(total);
  out.report.holes_filled = holes;
  out.report.depth_rejected = depth_rejected;
  return out;
}

std::pair<int, int> crop_offsets(int src_w, int src_h, int target_w, int target_h) {
  if (target_w > src_w || target_h > src_h)
    throw CropTooLarge("crop target exceeds source dimensions");
  if (target_w <= 0 || target_h <= 0) throw CropTooLarge("crop target must be positive");
  return {(src_w - target_w) / 2, (src_h - target_h) / 2};
}

ImageBuffer crop_center(const ImageBuffer& img, int target_w, int target_h) {
  const auto [ox, oy] = crop_offsets(img.width, img.height, target_w, target_h);
  ImageBuffer out;
  out.width = target_w;
  out.height = target_h;
  out.pixels.resize(static_cast<std::size_t>(target_w) * target_h * 3);
  for (int y = 0; y < target_h; ++y)
    std::copy_n(img.at(ox, oy + y), static_cast<std::size_t>(target_w) * 3, out.at(0, y));
  return out;
}

HoleMask crop_center(const HoleMask& mask, int target_w, int target_h) {
  const auto [ox, oy] = crop_offsets(mask.width, mask.height, target_w, target_h);
  HoleMask out;
  out.width = target_w;
  out.height = target_h;
  out.bits.resize(static_cast<std::size_t>(target_w) * target_h);
  for (int y = 0; y < target_h; ++y)
    std::copy_n(mask.bits.begin() + static_cast<std::size_t>(oy + y) * mask.width + ox,
                target_w, out.bits.begin() + static_cast<std::size_t>(y) * target_w);
  return out;
}

CameraIntrinsics crop_intrinsics(const CameraIntrinsics& k, int target_w, int target_h) {
  const auto [ox, oy] = crop_offsets(k.width, k.height, target_w, target_h);
  return CameraIntrinsics(k.fx, k.fy, k.cx - ox, k.cy - oy, target_w, target_h);
}

ImageBuffer fill_holes(const ImageBuffer& img, const HoleMask& mask) {
  if (img.width != mask.width || img.height != mask.height)
    throw ShapeMismatch("image and mask dimensions differ");

  const int w = img.width;
  const int h = img.height;
  bool any_valid = false;
  for (auto b : mask.bits)
    if (!b) { any_valid = true; break; }
  if (!any_valid) throw AllHoles("every pixel is masked");

  ImageBuffer cur = img;
  std::vector<std::uint8_t> holes = mask.bits;
  bool changed = true;
  while (changed) {
    changed = false;
    ImageBuffer next = cur;
    std::vector<std::uint8_t> next_holes = holes;
    // Neighbor priority: up, left, right, down; reads this round's state only.
    static const int dx[4] = {0, -1, 1, 0};
    static const int dy[4] = {-1, 0, 0, 1};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (!holes[idx]) continue;
        for (int n = 0; n < 4; ++n) {
          const int nx = x + dx[n];
          const int ny = y + dy[n];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          if (holes[static_cast<std::size_t>(ny) * w + nx]) continue;
          const std::uint8_t* src = cur.at(nx, ny);
          std::uint8_t* dst = next.at(x, y);
          dst[0] = src[0];
          dst[1] = src[1];
          dst[2] = src[2];
          next_holes[idx] = 0;
          changed = true;
          break;
        }
      }
    }
    cur = std::move(next);
    holes = std::move(next_holes);
  }
  return cur;
}

}  // namespace mono3d
