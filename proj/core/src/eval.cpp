#include "mono3d/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

namespace mono3d {

namespace fs = std::filesystem;

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::AP3D: return "ap3d";
    case Metric::APBEV: return "apbev";
    case Metric::AP2D: return "ap2d";
  }
  return "?";
}

const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

double iou_2d(const Rect2D& a, const Rect2D& b) {
  if (!(a.right > a.left) || !(a.bottom > a.top) || !(b.right > b.left) ||
      !(b.bottom > b.top))
    throw InvalidRect("degenerate rectangle");
  const double w = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double h = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (w <= 0 || h <= 0) return 0.0;
  const double inter = w * h;
  const double area_a = (a.right - a.left) * (a.bottom - a.top);
  const double area_b = (b.right - b.left) * (b.bottom - b.top);
  return inter / (area_a + area_b - inter);
}

double ConvexPolygon::area() const {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double a = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(a) / 2.0;
}

ConvexPolygon polygon_clip(const ConvexPolygon& subject, const ConvexPolygon& clip) {
  std::vector<Vec2> poly = subject.vertices;
  const auto& cv = clip.vertices;
  const std::size_t cn = cv.size();
  for (std::size_t i = 0; i < cn && !poly.empty(); ++i) {
    const Vec2& a = cv[i];
    const Vec2& b = cv[(i + 1) % cn];
    auto side = [&](const Vec2& p) {
      return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    };
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2& p = poly[j];
      const Vec2& q = poly[(j + 1) % n];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0) out.push_back(p);
      if ((sp < 0) != (sq < 0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
    poly = std::move(out);
  }
  return ConvexPolygon{std::move(poly)};
}

ConvexPolygon bev_footprint(const BoxCorners& corners) {
  // Andrew monotone chain over the 8 (x, z) projections, CCW output.
  std::array<Vec2, 8> pts;
  for (int i = 0; i < 8; ++i) pts[i] = Vec2(corners.corners[i].x(), corners.corners[i].z());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(16);
  std::size_t k = 0;
  for (int i = 0; i < 8; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (int i = 6; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return ConvexPolygon{std::move(hull)};
}

double iou_bev(const BoxCorners& a, const BoxCorners& b) {
  const ConvexPolygon fa = bev_footprint(a);
  const ConvexPolygon fb = bev_footprint(b);
  const double area_a = fa.area();
  const double area_b = fb.area();
  if (area_a <= 0 || area_b <= 0) throw DegenerateBox("zero-area BEV footprint");
  const double inter = polygon_clip(fa, fb).area();
  return inter / (area_a + area_b - inter);
}

namespace {

void y_extent(const BoxCorners& c, double& lo, double& hi) {
  lo = hi = c.corners[0].y();
  for (const auto& p : c.corners) {
    lo = std::min(lo, p.y());
    hi = std::max(hi, p.y());
  }
}

}  // namespace

double iou_3d(const BoxCorners& a, const BoxCorners& b) {
  const ConvexPolygon fa = bev_footprint(a);
  const ConvexPolygon fb = bev_footprint(b);
  const double area_a = fa.area();
  const double area_b = fb.area();
  if (area_a <= 0 || area_b <= 0) throw DegenerateBox("zero-area BEV footprint");
  double alo, ahi, blo, bhi;
  y_extent(a, alo, ahi);
  y_extent(b, blo, bhi);
  const double y_overlap = std::max(0.0, std::min(ahi, bhi) - std::max(alo, blo));
  const double inter = polygon_clip(fa, fb).area() * y_overlap;
  const double vol_a = area_a * (ahi - alo);
  const double vol_b = area_b * (bhi - blo);
  return inter / (vol_a + vol_b - inter);
}

namespace {

double corner_volume(const BoxCorners& c) {
  // Edge lengths from the fixed enumeration: 0-1 width, 0-3 length, 0-4 height.
  const double w = (c.corners[0] - c.corners[1]).norm();
  const double l = (c.corners[0] - c.corners[3]).norm();
  const double h = (c.corners[0] - c.corners[4]).norm();
  return w * l * h;
}

}  // namespace

double iou_3d_exact(const BoxCorners& a, const BoxCorners& b) {
  const double vol_a = corner_volume(a);
  const double vol_b = corner_volume(b);
  if (vol_a <= 0 || vol_b <= 0) throw DegenerateBox("zero-volume box");
  const double inter = box_intersection_volume(a, b);
  return inter / (vol_a + vol_b - inter);
}

std::optional<Difficulty> assign_difficulty(const LabelRecord& rec) {
  // KITTI devkit convention.
  static constexpr double kMinHeight[3] = {40.0, 25.0, 25.0};
  static constexpr int kMaxOcclusion[3] = {0, 1, 2};
  static constexpr double kMaxTruncation[3] = {0.15, 0.30, 0.50};
  const double height = rec.bbox_height();
  for (int t = 0; t < 3; ++t) {
    if (height >= kMinHeight[t] && rec.occluded <= kMaxOcclusion[t] &&
        rec.truncated <= kMaxTruncation[t])
      return static_cast<Difficulty>(t);
  }
  return std::nullopt;
}

namespace {

double pair_iou(const BoxCorners& det, const BoxCorners& gt, const EvalConfig& cfg) {
  switch (cfg.metric) {
    case Metric::APBEV:
      return iou_bev(det, gt);
    case Metric::AP3D:
      return cfg.exact_tilted ? iou_3d_exact(det, gt) : iou_3d(det, gt);
    case Metric::AP2D:
      throw Error("2D metric has no corner-based IoU");  // handled at frame level
  }
  return 0.0;
}

std::vector<std::size_t> order_by_score(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });
  return idx;
}

}  // namespace

MatchResult match_frame(const std::vector<ScoredBox>& dets,
                        const std::vector<BoxCorners>& gts, const EvalConfig& cfg) {
  std::vector<double> scores(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!std::isfinite(dets[i].score)) throw Error("non-finite detection score");
    scores[i] = dets[i].score;
  }
  const auto order = order_by_score(scores);

  std::vector<bool> gt_taken(gts.size(), false);
  MatchResult res;
  res.detections.reserve(dets.size());
  for (std::size_t oi : order) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g]) continue;
      const double v = pair_iou(dets[oi].corners, gts[g], cfg);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    MatchResult::Det d;
    d.score = dets[oi].score;
    if (best_gt < gts.size() && best >= cfg.iou_threshold) {
      gt_taken[best_gt] = true;
      d.tp = true;
    }
    res.detections.push_back(d);
  }
  res.unmatched_gts = static_cast<int>(
      std::count(gt_taken.begin(), gt_taken.end(), false));
  return res;
}

PRCurve ap_from_matches(std::vector<std::pair<double, bool>> scored_flags,
                        std::size_t gt_count, int recall_points) {
  if (recall_points != 40 && recall_points != 11)
    throw Error("recall_points must be 40 or 11");

  PRCurve out;
  if (gt_count == 0) {
    out.ap = 0.0;
    out.zero_gt_flagged = !scored_flags.empty();
    return out;
  }

  std::stable_sort(scored_flags.begin(), scored_flags.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::size_t tp = 0, fp = 0;
  std::vector<double> recalls, precisions;
  recalls.reserve(scored_flags.size());
  precisions.reserve(scored_flags.size());
  for (const auto& [score, is_tp] : scored_flags) {
    (void)score;
    if (is_tp) ++tp; else ++fp;
    recalls.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
    precisions.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  out.points.resize(recalls.size());
  for (std::size_t i = 0; i < recalls.size(); ++i)
    out.points[i] = {recalls[i], precisions[i]};

  // Right-to-left max makes interpolated precision monotone non-increasing.
  for (std::size_t i = precisions.size(); i-- > 1;)
    precisions[i - 1] = std::max(precisions[i - 1], precisions[i]);

  auto precision_at = [&](double r) {
    // First index reaching recall >= r; unreachable recall contributes 0.
    auto it = std::lower_bound(recalls.begin(), recalls.end(), r);
    if (it == recalls.end()) return 0.0;
    return precisions[static_cast<std::size_t>(it - recalls.begin())];
  };

  double sum = 0.0;
  if (recall_points == 40) {
    for (int i = 1; i <= 40; ++i) sum += precision_at(i / 40.0);
    out.ap = sum / 40.0;
  } else {
    for (int i = 0; i <= 10; ++i) sum += precision_at(i / 10.0);
    out.ap = sum / 11.0;
  }
  return out;
}

BoxCorners record_corners(const LabelRecord& rec,
                          const std::optional<RotationMatrix>& rotation) {
  Box3D box;
  box.center = kitti_location_to_center(rec.location, rec.h);
  box.h = rec.h;
  box.w = rec.w;
  box.l = rec.l;
  box.heading = rotation ? Heading::full_rotation(*rotation)
                         : Heading::yaw_only(rec.rotation_y);
  return box_corners(box);
}

namespace {

Rect2D record_rect(const LabelRecord& r) { return {r.left, r.top, r.right, r.bottom}; }

struct FrameEval {
  // Pooled per-detection flags: tp, fp or ignored (dropped).
  std::vector<std::pair<double, bool>> scored_flags;
  std::size_t counted_gt = 0;
};

// KITTI-style single-frame evaluation for one tier. Tier-excluded GTs of the
// evaluated class are "ignored": not counted, and a detection whose best
// remaining overlap is with one is dropped instead of becoming an FP.
FrameEval eval_frame_tier(const EvalFrame& frame, Difficulty tier, Metric metric,
                          const EvalConfig& cfg) {
  FrameEval out;

  struct Gt {
    BoxCorners corners;
    Rect2D rect;
    bool counted = false;
    bool taken = false;
  };
  std::vector<Gt> gts;
  std::vector<Rect2D> dont_care;
  const auto& gt_rots = frame.gt.rotations;
  for (std::size_t i = 0; i < frame.gt.records.size(); ++i) {
    const auto& rec = frame.gt.records[i];
    if (rec.is_dont_care()) {
      dont_care.push_back(record_rect(rec));
      continue;
    }
    if (rec.class_name != cfg.class_filter) continue;
    Gt g;
    g.rect = record_rect(rec);
    if (metric != Metric::AP2D)
      g.corners = record_corners(rec, gt_rots.empty() ? std::nullopt : gt_rots[i]);
    const auto diff = assign_difficulty(rec);
    g.counted = diff.has_value() && *diff <= tier;
    gts.push_back(std::move(g));
  }

  struct Det {
    BoxCorners corners;
    Rect2D rect;
    double score = 0;
  };
  std::vector<Det> dets;
  const auto& det_rots = frame.det.rotations;
  for (std::size_t i = 0; i < frame.det.records.size(); ++i) {
    const auto& rec = frame.det.records[i];
    if (rec.class_name != cfg.class_filter) continue;
    Det d;
    d.rect = record_rect(rec);
    d.score = rec.score.value_or(0.0);
    if (metric != Metric::AP2D)
      d.corners = record_corners(rec, det_rots.empty() ? std::nullopt : det_rots[i]);
    dets.push_back(std::move(d));
  }

  std::vector<double> scores(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) scores[i] = dets[i].score;
  const auto order = order_by_score(scores);

  auto overlap = [&](const Det& d, const Gt& g) {
    if (metric == Metric::AP2D) return iou_2d(d.rect, g.rect);
    EvalConfig mc = cfg;
    mc.metric = metric;
    return pair_iou(d.corners, g.corners, mc);
  };

  for (std::size_t oi : order) {
    const Det& d = dets[oi];
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].taken) continue;
      const double v = overlap(d, gts[g]);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size() && best >= cfg.iou_threshold) {
      gts[best_gt].taken = true;
      if (gts[best_gt].counted) {
        out.scored_flags.emplace_back(d.score, true);
      }
      // Matched an ignored GT: dropped, neither TP nor FP.
      continue;
    }
    // DontCare regions absorb stray detections at 2D IoU >= 0.5.
    bool in_dont_care = false;
    for (const auto& dc : dont_care) {
      if ((dc.right > dc.left) && (dc.bottom > dc.top) && iou_2d(d.rect, dc) >= 0.5) {
        in_dont_care = true;
        break;
      }
    }
    if (!in_dont_care) out.scored_flags.emplace_back(d.score, false);
  }

  for (const auto& g : gts)
    if (g.counted) ++out.counted_gt;
  return out;
}

}  // namespace

std::vector<ApEntry> evaluate_frames(const std::vector<EvalFrame>& frames,
                                     const EvalConfig& cfg,
                                     const std::vector<Metric>& metrics) {
  std::vector<ApEntry> out;
  for (Metric metric : metrics) {
    for (int t = 0; t < 3; ++t) {
      const auto tier = static_cast<Difficulty>(t);
      std::vector<std::pair<double, bool>> pooled;
      std::size_t gt_count = 0;
      for (const auto& frame : frames) {
        FrameEval fe = eval_frame_tier(frame, tier, metric, cfg);
        pooled.insert(pooled.end(), fe.scored_flags.begin(), fe.scored_flags.end());
        gt_count += fe.counted_gt;
      }
      const PRCurve pr = ap_from_matches(std::move(pooled), gt_count, cfg.recall_points);
      out.push_back({metric, tier, pr.ap, pr.zero_gt_flagged});
    }
  }
  return out;
}

namespace {

FrameObjects load_frame_objects(const fs::path& label_path) {
  FrameObjects out;
  out.records = parse_label_file(read_text_file(label_path.string()));
  fs::path rot_path = label_path;
  rot_path.replace_extension(".rot.txt");
  if (fs::exists(rot_path)) {
    const auto rots = parse_rotation_sidecar(read_text_file(rot_path.string()));
    if (rots.size() != out.records.size())
      throw MalformedLabel("rotation sidecar line count differs from label file",
                           0, static_cast<int>(rots.size()));
    out.rotations.reserve(rots.size());
    for (const auto& r : rots) out.rotations.emplace_back(r);
  }
  return out;
}

}  // namespace

std::vector<EvalFrame> load_eval_frames(const std::string& det_dir,
                                        const std::string& gt_dir,
                                        const std::string& calib_dir) {
  std::set<std::string> ids;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    if (!e.is_regular_file()) continue;
    const fs::path p = e.path();
    if (p.extension() != ".txt") continue;
    // skip sidecars (<frame>.rot.txt)
    if (p.stem().extension() == ".rot") continue;
    ids.insert(p.stem().string());
  }

  std::vector<EvalFrame> frames;
  for (const auto& id : ids) {
    EvalFrame f;
    f.id = id;
    f.gt = load_frame_objects(fs::path(gt_dir) / (id + ".txt"));
    const fs::path det_path = fs::path(det_dir) / (id + ".txt");
    if (!fs::exists(det_path)) throw MissingFrame(id);
    f.det = load_frame_objects(det_path);
    if (!calib_dir.empty()) {
      const fs::path calib_path = fs::path(calib_dir) / (id + ".txt");
      if (!fs::exists(calib_path)) throw MissingFrame(id);
      parse_calib(read_text_file(calib_path.string()));  // validates
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<ApEntry> evaluate_dataset(const std::string& det_dir,
                                      const std::string& gt_dir,
                                      const std::string& calib_dir,
                                      const EvalConfig& cfg,
                                      const std::vector<Metric>& metrics) {
  return evaluate_frames(load_eval_frames(det_dir, gt_dir, calib_dir), cfg, metrics);
}

std::string format_ap_table(const std::vector<ApEntry>& entries) {
  std::string out = "metric   easy     moderate hard\n";
  char buf[128];
  for (std::size_t i = 0; i < entries.size(); i += 3) {
    const int len = std::snprintf(buf, sizeof(buf), "%-8s %-8.2f %-8.2f %-8.2f\n",
                                  metric_name(entries[i].metric), entries[i].ap * 100.0,
                                  entries[i + 1].ap * 100.0, entries[i + 2].ap * 100.0);
    out.append(buf, len);
  }
  return out;
}

std::string format_ap_csv(const std::vector<ApEntry>& entries) {
  std::string out = "metric,tier,ap\n";
  char buf[128];
  for (const auto& e : entries) {
    const int len = std::snprintf(buf, sizeof(buf), "%s,%s,%.2f\n", metric_name(e.metric),
                                  difficulty_name(e.tier), e.ap * 100.0);
    out.append(buf, len);
  }
  return out;
}

}  // namespace mono3d
