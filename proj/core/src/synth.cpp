#include "mono3d/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mono3d {

namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr int kCropW = 804;
constexpr int kCropH = 244;

// splitmix64-based generator; self-contained so seeded runs are byte-stable
// across standard libraries.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian() {
    // Box-Muller; both uniforms drawn even though one output is used.
    const double u1 = std::max(uniform(), 1e-16);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace

CameraIntrinsics synth_full_intrinsics() {
  return CameraIntrinsics(721.5377, 721.5377, 609.5593, 172.854, 1280, 375);
}

CameraIntrinsics synth_crop_intrinsics() {
  // Offsets (238, 65) for 1280x375 -> 804x244.
  return CameraIntrinsics(721.5377, 721.5377, 609.5593 - 238.0, 172.854 - 65.0,
                          kCropW, kCropH);
}

Box3D synth_gt_box(const SceneObject& obj, const PoseSpec& pose) {
  const RigidPose rigid = pose_spec_to_rigid(pose);
  Box3D box;
  box.center = rigid.apply(Vec3(obj.x, obj.y_bottom - obj.h / 2, obj.z));
  box.h = obj.h;
  box.w = obj.w;
  box.l = obj.l;
  box.heading = Heading::full_rotation(compose_r3d(
      pose.roll_deg * kDeg, obj.yaw + pose.yaw_deg * kDeg, pose.pitch_deg * kDeg));
  return box;
}

namespace {

Vec3 detection_center(const SceneObject& obj, const PoseSpec& pose, bool noise) {
  const RigidPose rigid = pose_spec_to_rigid(pose);
  Vec3 ref_center(obj.x, obj.y_bottom - obj.h / 2, obj.z);
  if (noise) {
    // Placement offset along the box width axis, sized so the zero-rotation
    // detection IoU equals iou_target; rides rigidly with the object.
    const double s =
        obj.lateral_sign * obj.w * (1.0 - obj.iou_target) / (1.0 + obj.iou_target);
    ref_center += rot_axis(Axis::Y, obj.yaw) * Vec3(0, 0, s);
  }
  return rigid.apply(ref_center);
}

}  // namespace

Box3D synth_detection_box(const SceneObject& obj, const PoseSpec& pose, bool noise) {
  Box3D gt = synth_gt_box(obj, pose);
  Box3D det;
  det.center = detection_center(obj, pose, noise);
  det.h = obj.h;
  det.w = obj.w;
  det.l = obj.l;
  det.heading = Heading::yaw_only(extract_yaw(gt.heading.matrix()));
  return det;
}

namespace {

// Projects box corners through the cropped intrinsics; returns the clamped
// 2D rect and the clipping fraction.
struct Projected2D {
  Rect2D rect;
  double truncation = 0.0;
  double raw_height = 0.0;
  bool inside = true;  // all corners within the crop by >= 2 px
};

Projected2D project_bbox(const Box3D& box, const CameraIntrinsics& k) {
  const BoxCorners corners = box_corners(box);
  double lo_u = 1e18, hi_u = -1e18, lo_v = 1e18, hi_v = -1e18;
  for (const auto& c : corners.corners) {
    const Vec2 px = project(k, c);
    lo_u = std::min(lo_u, px.x());
    hi_u = std::max(hi_u, px.x());
    lo_v = std::min(lo_v, px.y());
    hi_v = std::max(hi_v, px.y());
  }
  Projected2D out;
  out.raw_height = hi_v - lo_v;
  out.inside = lo_u >= 2.0 && hi_u <= k.width - 2.0 && lo_v >= 2.0 && hi_v <= k.height - 2.0;
  const double full = (hi_u - lo_u) * (hi_v - lo_v);
  const double cl = std::max(lo_u, 0.0), cr = std::min(hi_u, double(k.width));
  const double ct = std::max(lo_v, 0.0), cb = std::min(hi_v, double(k.height));
  const double clamped = std::max(0.0, cr - cl) * std::max(0.0, cb - ct);
  out.truncation = full > 0 ? std::max(0.0, 1.0 - clamped / full) : 1.0;
  out.rect = {cl, ct, cr, cb};
  return out;
}

LabelRecord box_to_record(const Box3D& box, double yaw_field, double truncated,
                          const Rect2D& rect, std::optional<double> score) {
  LabelRecord rec;
  rec.class_name = "Car";
  rec.truncated = truncated;
  rec.occluded = 0;
  rec.alpha = normalize_angle(yaw_field - std::atan2(box.center.x(), box.center.z()));
  rec.left = rect.left;
  rec.top = rect.top;
  rec.right = rect.right;
  rec.bottom = rect.bottom;
  rec.h = box.h;
  rec.w = box.w;
  rec.l = box.l;
  rec.location = kitti_center_to_location(box.center, box.h);
  rec.rotation_y = normalize_angle(yaw_field);
  rec.score = score;
  return rec;
}

bool is_pure_yaw(const RotationMatrix& r, double tol = 1e-6) {
  const RotationMatrix ref = rot_axis(Axis::Y, extract_yaw(r));
  return (r.matrix() - ref.matrix()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

std::vector<SweepPose> sweep_poses() {
  std::vector<SweepPose> poses;
  for (const char* axis : {"pitch", "roll", "yaw"}) {
    for (int deg = 0; deg <= 5; ++deg) {
      SweepPose p;
      p.axis = axis;
      p.amount = deg;
      if (p.axis == "pitch") p.spec.pitch_deg = deg;
      else if (p.axis == "roll") p.spec.roll_deg = deg;
      else p.spec.yaw_deg = deg;
      poses.push_back(p);
    }
  }
  for (double t : {0.5, -0.5}) {
    poses.push_back({"tx", t, PoseSpec{0, 0, 0, t, 0, 0}});
    poses.push_back({"ty", t, PoseSpec{0, 0, 0, 0, t, 0}});
  }
  return poses;
}

SynthScene make_scene(const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  const CameraIntrinsics k = synth_crop_intrinsics();
  const auto poses = sweep_poses();

  SynthScene scene;
  scene.frames.resize(cfg.frames);
  for (int f = 0; f < cfg.frames; ++f) {
    const int target = 3 + static_cast<int>(rng.next() % 3);  // 3..5 cars
    auto& objs = scene.frames[f];
    int attempts = 0;
    while (static_cast<int>(objs.size()) < target && attempts < 400) {
      ++attempts;
      SceneObject o;
      o.z = rng.uniform(13.0, 24.5);
      o.x = rng.uniform(-0.18, 0.18) * o.z;
      o.y_bottom = rng.uniform(1.5, 1.8);
      o.h = rng.uniform(1.52, 1.78);
      o.w = rng.uniform(1.55, 1.85);
      o.l = rng.uniform(3.6, 4.4);
      o.yaw = rng.uniform(-M_PI, M_PI);
      o.iou_target = rng.uniform(kIouBandLow, kIouBandHigh);
      o.lateral_sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      o.score = rng.uniform(0.5, 1.0);

      bool ok = true;
      for (const auto& other : objs) {
        const double dx = o.x - other.x, dz = o.z - other.z;
        if (dx * dx + dz * dz < 3.5 * 3.5) { ok = false; break; }
      }
      // The object must stay fully inside the crop, taller than the easy
      // floor, under every pose the sweep will apply.
      for (std::size_t p = 0; ok && p < poses.size(); ++p) {
        const Projected2D pr = project_bbox(synth_gt_box(o, poses[p].spec), k);
        if (!pr.inside || pr.raw_height < 41.0) ok = false;
      }
      if (ok) objs.push_back(o);
    }
  }
  return scene;
}

PoseFrames build_pose_frames(const SynthScene& scene, const PoseSpec& pose,
                             bool noise) {
  const CameraIntrinsics k = synth_crop_intrinsics();
  PoseFrames out;
  out.gt.resize(scene.frames.size());
  out.uncomp.resize(scene.frames.size());
  out.comp.resize(scene.frames.size());

  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    bool gt_any_tilted = false, comp_any_tilted = false;
    std::vector<RotationMatrix> gt_rots, comp_rots;
    for (const SceneObject& obj : scene.frames[f]) {
      const Box3D gt = synth_gt_box(obj, pose);
      const RotationMatrix gt_rot = gt.heading.matrix();
      const double yaw_hat = extract_yaw(gt_rot);
      const Projected2D gt_px = project_bbox(gt, k);
      out.gt[f].records.push_back(
          box_to_record(gt, yaw_hat, gt_px.truncation, gt_px.rect, std::nullopt));
      gt_rots.push_back(gt_rot);
      if (!is_pure_yaw(gt_rot)) gt_any_tilted = true;

      const Box3D det = synth_detection_box(obj, pose, noise);
      const Projected2D det_px = project_bbox(det, k);
      out.uncomp[f].records.push_back(
          box_to_record(det, det.heading.yaw(), 0.0, det_px.rect, obj.score));

      // Compensated variant: same record, heading rebuilt with the pose's
      // roll/pitch; a sidecar carries the tilt.
      const RotationMatrix comp_rot =
          compose_r3d(pose.roll_deg * kDeg, det.heading.yaw(), pose.pitch_deg * kDeg);
      out.comp[f].records.push_back(
          box_to_record(det, det.heading.yaw(), 0.0, det_px.rect, obj.score));
      comp_rots.push_back(comp_rot);
      if (!is_pure_yaw(comp_rot)) comp_any_tilted = true;
    }
    if (gt_any_tilted) {
      for (const auto& r : gt_rots) out.gt[f].rotations.emplace_back(r);
    }
    if (comp_any_tilted) {
      for (const auto& r : comp_rots) out.comp[f].rotations.emplace_back(r);
    }
  }
  return out;
}

std::vector<EvalFrame> to_eval_frames(const std::vector<FrameObjects>& gt,
                                      const std::vector<FrameObjects>& det) {
  std::vector<EvalFrame> frames(gt.size());
  char buf[16];
  for (std::size_t i = 0; i < gt.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%06zu", i);
    frames[i].id = buf;
    frames[i].gt = gt[i];
    frames[i].det = det[i];
  }
  return frames;
}

std::vector<SweepRow> run_sweep(const SynthConfig& cfg) {
  const SynthScene scene = make_scene(cfg);
  EvalConfig ec;
  std::vector<SweepRow> rows;
  for (const SweepPose& pose : sweep_poses()) {
    const PoseFrames pf = build_pose_frames(scene, pose.spec, cfg.placement_noise);
    for (const char* variant : {"uncompensated", "compensated"}) {
      const auto& det = variant[0] == 'u' ? pf.uncomp : pf.comp;
      const auto entries = evaluate_frames(to_eval_frames(pf.gt, det), ec,
                                           {Metric::AP3D, Metric::APBEV});
      SweepRow row;
      row.axis = pose.axis;
      row.amount = pose.amount;
      row.variant = variant;
      row.ap3d_moderate = entries[1].ap;    // AP3D rows come first, tiers E/M/H
      row.apbev_moderate = entries[4].ap;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "axis,angle,variant,ap\n";
  char buf[128];
  for (const auto& r : rows) {
    const int len = std::snprintf(buf, sizeof(buf), "%s,%g,%s,%.2f\n", r.axis.c_str(),
                                  r.amount, r.variant.c_str(), r.ap3d_moderate * 100.0);
    out.append(buf, len);
  }
  return out;
}

std::string format_sweep_summary(const std::vector<SweepRow>& rows) {
  std::string out =
      "synthetic sweep, moderate tier (AP in %)\n"
      "axis     amount   variant         AP_3D    AP_BEV\n";
  char buf[160];
  for (const auto& r : rows) {
    const int len = std::snprintf(buf, sizeof(buf), "%-8s %-8g %-15s %-8.2f %-8.2f\n",
                                  r.axis.c_str(), r.amount, r.variant.c_str(),
                                  r.ap3d_moderate * 100.0, r.apbev_moderate * 100.0);
    out.append(buf, len);
  }
  return out;
}

std::vector<AblationFrame> make_depth_corrupted_frames(std::uint64_t seed, int frames,
                                                       double sigma_z) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.frames = frames;
  cfg.placement_noise = false;
  const SynthScene scene = make_scene(cfg);
  const CameraIntrinsics k = synth_crop_intrinsics();
  const PoseSpec identity;

  Rng rng(seed ^ 0x5eedf00dULL);
  std::vector<AblationFrame> out(scene.frames.size());
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    for (const SceneObject& obj : scene.frames[f]) {
      const Box3D gt = synth_gt_box(obj, identity);
      const Projected2D gt_px = project_bbox(gt, k);
      out[f].gts.push_back(box_to_record(gt, obj.yaw, 0.0, gt_px.rect, std::nullopt));

      // Depth-only corruption along the viewing ray; clamped so the 2D boxes
      // still pair at IoU >= 0.3 and depth stays positive.
      double dz = sigma_z * rng.gaussian();
      dz = std::clamp(dz, -4.5, 4.5);
      const double depth = std::max(1.0, gt.center.z() + dz);
      Box3D pred = gt;
      pred.center = backproject_center(k, project(k, gt.center), depth);
      const Projected2D pred_px = project_bbox(pred, k);
      out[f].preds.push_back(
          box_to_record(pred, obj.yaw, 0.0, pred_px.rect, rng.uniform(0.5, 1.0)));
    }
  }
  return out;
}

}  // namespace mono3d
