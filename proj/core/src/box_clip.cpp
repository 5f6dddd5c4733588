#include <algorithm>
#include <cmath>
#include <vector>

#include "mono3d/eval.hpp"

// Exact intersection volume of two oriented boxes: box A's polyhedron is
// clipped against box B's six half-spaces (3D Sutherland-Hodgman on the face
// list, closing each cut with a cap polygon), then the volume comes from the
// divergence theorem over outward-oriented faces.

namespace mono3d {

namespace {

using Polygon3 = std::vector<Vec3>;

struct Plane {
  Vec3 n;    // outward normal, unit
  double d;  // n . p <= d inside
};

constexpr double kEps = 1e-9;

// Faces of the fixed corner enumeration, wound CCW seen from outside.
constexpr int kFaces[6][4] = {
    {0, 1, 2, 3},  // +h
    {4, 7, 6, 5},  // -h
    {0, 4, 5, 1},  // +l
    {3, 2, 6, 7},  // -l
    {0, 3, 7, 4},  // +w
    {1, 5, 6, 2},  // -w
};

std::vector<Polygon3> box_faces(const BoxCorners& b) {
  std::vector<Polygon3> faces(6);
  for (int f = 0; f < 6; ++f) {
    faces[f].reserve(4);
    for (int i = 0; i < 4; ++i) faces[f].push_back(b.corners[kFaces[f][i]]);
  }
  return faces;
}

std::array<Plane, 6> box_planes(const BoxCorners& b) {
  std::array<Plane, 6> planes;
  for (int f = 0; f < 6; ++f) {
    const Vec3& p0 = b.corners[kFaces[f][0]];
    const Vec3& p1 = b.corners[kFaces[f][1]];
    const Vec3& p2 = b.corners[kFaces[f][2]];
    Vec3 n = (p1 - p0).cross(p2 - p1);
    const double len = n.norm();
    if (len <= 0) throw DegenerateBox("degenerate box face");
    n /= len;
    planes[f] = {n, n.dot(p0)};
  }
  return planes;
}

// Clips every face by the plane and closes the cut with a cap polygon.
void clip_by_plane(std::vector<Polygon3>& faces, const Plane& plane) {
  std::vector<Polygon3> out;
  out.reserve(faces.size() + 1);
  Polygon3 cap_points;

  for (const Polygon3& poly : faces) {
    Polygon3 kept;
    kept.reserve(poly.size() + 2);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = poly[i];
      const Vec3& q = poly[(i + 1) % n];
      const double sp = plane.n.dot(p) - plane.d;
      const double sq = plane.n.dot(q) - plane.d;
      if (sp <= kEps) kept.push_back(p);
      if ((sp > kEps && sq < -kEps) || (sp < -kEps && sq > kEps)) {
        const double t = sp / (sp - sq);
        const Vec3 x = p + t * (q - p);
        kept.push_back(x);
        cap_points.push_back(x);
      }
    }
    if (kept.size() >= 3) out.push_back(std::move(kept));
  }

  if (cap_points.size() >= 3) {
    // Dedup and order around the centroid; (t1, t2, n) right-handed makes the
    // increasing-angle order wind CCW with outward normal +n.
    Polygon3 uniq;
    for (const Vec3& p : cap_points) {
      bool dup = false;
      for (const Vec3& q : uniq)
        if ((p - q).squaredNorm() < 1e-16) { dup = true; break; }
      if (!dup) uniq.push_back(p);
    }
    if (uniq.size() >= 3) {
      Vec3 centroid = Vec3::Zero();
      for (const Vec3& p : uniq) centroid += p;
      centroid /= static_cast<double>(uniq.size());
      Vec3 t1 = (uniq[0] - centroid).normalized();
      Vec3 t2 = plane.n.cross(t1);
      std::sort(uniq.begin(), uniq.end(), [&](const Vec3& a, const Vec3& b) {
        const Vec3 da = a - centroid;
        const Vec3 db = b - centroid;
        return std::atan2(da.dot(t2), da.dot(t1)) < std::atan2(db.dot(t2), db.dot(t1));
      });
      out.push_back(std::move(uniq));
    }
  }

  faces = std::move(out);
}

double polyhedron_volume(const std::vector<Polygon3>& faces) {
  double six_v = 0.0;
  for (const Polygon3& poly : faces) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
      six_v += poly[0].dot(poly[i].cross(poly[i + 1]));
  }
  return std::abs(six_v) / 6.0;
}

}  // namespace

double box_intersection_volume(const BoxCorners& a, const BoxCorners& b) {
  std::vector<Polygon3> faces = box_faces(a);
  for (const Plane& plane : box_planes(b)) {
    clip_by_plane(faces, plane);
    if (faces.empty()) return 0.0;
  }
  return polyhedron_volume(faces);
}

}  // namespace mono3d
