#pragma once

// Test-side oracles, deliberately independent of the library's linear
// algebra: raw-array 3x3 products, Gaussian-elimination solves, and a Monte
// Carlo box-intersection estimator.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "mono3d/geometry.hpp"

namespace oracle {

using M33 = std::array<std::array<double, 3>, 3>;
using V3 = std::array<double, 3>;

inline M33 mat_mul(const M33& a, const M33& b) {
  M33 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

inline V3 mat_vec(const M33& a, const V3& v) {
  V3 out{};
  for (int i = 0; i < 3; ++i)
    out[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
  return out;
}

inline M33 rot_x(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
inline M33 rot_y(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
inline M33 rot_z(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

// Solves A x = b by Gaussian elimination with partial pivoting.
inline V3 solve3(M33 a, V3 b) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  V3 x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

inline double max_abs_diff(const M33& a, const mono3d::Mat3& b) {
  double m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b(i, j)));
  return m;
}

// Point-in-oriented-box test straight from the corner set: recovers the box
// frame from corners 0/1/3/4 of the fixed enumeration.
struct CornerBoxFrame {
  mono3d::Vec3 origin;
  mono3d::Vec3 ax_l, ax_h, ax_w;  // unit axes
  double l, h, w;

  explicit CornerBoxFrame(const mono3d::BoxCorners& b) {
    const auto& c = b.corners;
    origin = mono3d::Vec3::Zero();
    for (const auto& p : c) origin += p;
    origin /= 8.0;
    ax_w = c[0] - c[1];
    w = ax_w.norm();
    ax_w /= w;
    ax_l = c[0] - c[3];
    l = ax_l.norm();
    ax_l /= l;
    ax_h = c[0] - c[4];
    h = ax_h.norm();
    ax_h /= h;
  }

  bool contains(const mono3d::Vec3& p) const {
    const mono3d::Vec3 d = p - origin;
    return std::abs(d.dot(ax_l)) <= l / 2 && std::abs(d.dot(ax_h)) <= h / 2 &&
           std::abs(d.dot(ax_w)) <= w / 2;
  }
};

// Monte Carlo IoU over the union's axis-aligned bounding box.
inline double mc_iou_3d(const mono3d::BoxCorners& a, const mono3d::BoxCorners& b,
                        std::size_t samples, std::uint64_t seed) {
  const CornerBoxFrame fa(a), fb(b);
  mono3d::Vec3 lo = a.min().cwiseMin(b.min());
  mono3d::Vec3 hi = a.max().cwiseMax(b.max());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x());
  std::uniform_real_distribution<double> uy(lo.y(), hi.y());
  std::uniform_real_distribution<double> uz(lo.z(), hi.z());
  std::size_t inter = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const mono3d::Vec3 p(ux(rng), uy(rng), uz(rng));
    if (fa.contains(p) && fb.contains(p)) ++inter;
  }
  const double box_vol = (hi - lo).prod();
  const double inter_vol = box_vol * static_cast<double>(inter) / static_cast<double>(samples);
  const double va = fa.l * fa.h * fa.w;
  const double vb = fb.l * fb.h * fb.w;
  return inter_vol / (va + vb - inter_vol);
}

}  // namespace oracle
