#pragma once

#include <cstdint>
#include <vector>

namespace mono3d {

// Row-major RGB, 8-bit channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  static ImageBuffer filled(int width, int height, std::uint8_t r, std::uint8_t g,
                            std::uint8_t b);
  std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

// Row-major float32 depth in meters. Non-positive or non-finite entries mark
// missing stereo matches and are skipped by the warp.
struct DepthRaster {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // width * height

  static DepthRaster constant(int width, int height, float value);
  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

// true = no source pixel landed here.
struct HoleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // width * height, 0 or 1

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
};

}  // namespace mono3d
