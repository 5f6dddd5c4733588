#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mono3d/geometry.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

enum class Metric { AP3D, APBEV, AP2D };
enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2 };

const char* metric_name(Metric m);
const char* difficulty_name(Difficulty d);

struct EvalConfig {
  double iou_threshold = 0.7;
  int recall_points = 40;  // 40 or 11
  Metric metric = Metric::AP3D;
  std::string class_filter = "Car";
  // Exact convex-polytope 3D IoU for roll/pitch-tilted boxes instead of the
  // default BEV-hull x y-extent envelope.
  bool exact_tilted = false;
};

struct Rect2D {
  double left = 0, top = 0, right = 0, bottom = 0;
};

double iou_2d(const Rect2D& a, const Rect2D& b);

// Ground-plane polygon, CCW vertices in (x, z) meters.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
  double area() const;
};

// Sutherland-Hodgman convex intersection. Empty result is a valid polygon
// with zero area.
ConvexPolygon polygon_clip(const ConvexPolygon& subject, const ConvexPolygon& clip);

// Convex hull of the 8 corners projected to (x, z). Handles tilted boxes.
ConvexPolygon bev_footprint(const BoxCorners& corners);

double iou_bev(const BoxCorners& a, const BoxCorners& b);

// Prism IoU: BEV footprint intersection x y-extent overlap, with volumes
// footprint-area x y-extent. Exact for yaw-only boxes; an upper-envelope
// approximation for tilted ones.
double iou_3d(const BoxCorners& a, const BoxCorners& b);

// Exact intersection volume by clipping one box's polyhedron against the
// other's six half-spaces; volumes are the true h*w*l.
double iou_3d_exact(const BoxCorners& a, const BoxCorners& b);

// Intersection volume of two convex boxes given as corner sets (box_clip.cpp).
double box_intersection_volume(const BoxCorners& a, const BoxCorners& b);

// KITTI-convention tiers from 2D box height, occlusion and truncation.
std::optional<Difficulty> assign_difficulty(const LabelRecord& rec);

struct ScoredBox {
  BoxCorners corners;
  double score = 0.0;
};

struct MatchResult {
  // Per detection, descending score (stable on ties).
  struct Det {
    double score = 0.0;
    bool tp = false;
  };
  std::vector<Det> detections;
  int unmatched_gts = 0;
};

// Greedy matching: detections by descending score, each claims the unmatched
// GT with highest IoU provided IoU >= cfg.iou_threshold.
MatchResult match_frame(const std::vector<ScoredBox>& dets,
                        const std::vector<BoxCorners>& gts, const EvalConfig& cfg);

struct PRCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  double ap = 0.0;
  bool zero_gt_flagged = false;
};

// Pools (score, tp) pairs across frames, interpolates precision at the
// recall sample grid (1/N..1 for 40-point, 0..1 step 0.1 for 11-point).
PRCurve ap_from_matches(std::vector<std::pair<double, bool>> scored_flags,
                        std::size_t gt_count, int recall_points);

// One frame of labels plus optional per-object full rotations (sidecar).
struct FrameObjects {
  std::vector<LabelRecord> records;
  std::vector<std::optional<RotationMatrix>> rotations;  // empty or size-matched
};

struct EvalFrame {
  std::string id;
  FrameObjects gt;
  FrameObjects det;
};

struct ApEntry {
  Metric metric;
  Difficulty tier;
  double ap = 0.0;  // fraction in [0, 1]
  bool zero_gt = false;
};

// Per-difficulty AP for each requested metric. Tier-excluded ground truths
// are ignored KITTI-style: they are not counted and detections matching them
// are neither TP nor FP; likewise detections on DontCare regions (2D IoU >=
// 0.5).
std::vector<ApEntry> evaluate_frames(const std::vector<EvalFrame>& frames,
                                     const EvalConfig& cfg,
                                     const std::vector<Metric>& metrics);

// Directory layout: <dir>/<frame>.txt per frame, optional <frame>.rot.txt
// sidecars. The GT directory drives the frame list; a missing detection file
// raises MissingFrame. calib_dir may be empty; when given, files are parsed
// (validated) per frame.
std::vector<EvalFrame> load_eval_frames(const std::string& det_dir,
                                        const std::string& gt_dir,
                                        const std::string& calib_dir);

std::vector<ApEntry> evaluate_dataset(const std::string& det_dir,
                                      const std::string& gt_dir,
                                      const std::string& calib_dir,
                                      const EvalConfig& cfg,
                                      const std::vector<Metric>& metrics);

// Geometry of one labeled object: corners from the sidecar rotation when
// present, otherwise the yaw-only construction.
BoxCorners record_corners(const LabelRecord& rec,
                          const std::optional<RotationMatrix>& rotation);

std::string format_ap_table(const std::vector<ApEntry>& entries);
std::string format_ap_csv(const std::vector<ApEntry>& entries);

}  // namespace mono3d
