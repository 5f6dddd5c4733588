// Command-line front end: view synthesis, label re-expression, heading
// compensation, KITTI-style evaluation, factor-swap ablation, and the
// synthetic degradation/recovery demo.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mono3d/ablation.hpp"
#include "mono3d/eval.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/kitti_io.hpp"
#include "mono3d/synth.hpp"
#include "mono3d/warp.hpp"

namespace fs = std::filesystem;
using namespace mono3d;

namespace {

constexpr int kCropW = 804;
constexpr int kCropH = 244;
constexpr double kDeg = M_PI / 180.0;

PoseSpec load_pose(const std::string& path) {
  return parse_pose_spec(read_text_file(path));
}

Metric parse_metric(const std::string& name) {
  if (name == "ap3d") return Metric::AP3D;
  if (name == "apbev") return Metric::APBEV;
  if (name == "ap2d") return Metric::AP2D;
  throw Error("unknown metric '" + name + "' (expected ap3d|apbev|ap2d)");
}

bool is_pure_yaw(const RotationMatrix& r, double tol = 1e-6) {
  const RotationMatrix ref = rot_axis(Axis::Y, extract_yaw(r));
  return (r.matrix() - ref.matrix()).cwiseAbs().maxCoeff() <= tol;
}

Rect2D clamped_bbox(const Box3D& box, const CameraIntrinsics& k, double* truncation) {
  const BoxCorners corners = box_corners(box);
  double lo_u = 1e18, hi_u = -1e18, lo_v = 1e18, hi_v = -1e18;
  for (const auto& c : corners.corners) {
    const Vec2 px = project(k, c);
    lo_u = std::min(lo_u, px.x());
    hi_u = std::max(hi_u, px.x());
    lo_v = std::min(lo_v, px.y());
    hi_v = std::max(hi_v, px.y());
  }
  const double full = (hi_u - lo_u) * (hi_v - lo_v);
  Rect2D r{std::max(lo_u, 0.0), std::max(lo_v, 0.0), std::min(hi_u, double(k.width)),
           std::min(hi_v, double(k.height))};
  const double clamped = std::max(0.0, r.right - r.left) * std::max(0.0, r.bottom - r.top);
  if (truncation) *truncation = full > 0 ? std::max(0.0, 1.0 - clamped / full) : 1.0;
  return r;
}

struct Relabeled {
  std::vector<LabelRecord> records;
  std::vector<RotationMatrix> rotations;
  bool any_tilted = false;
};

void write_labels_with_sidecar(const std::string& out_path, const Relabeled& rl) {
  write_text_file(out_path, serialize_label_file(rl.records));
  if (rl.any_tilted) {
    fs::path rot_path(out_path);
    rot_path.replace_extension(".rot.txt");
    write_text_file(rot_path.string(), serialize_rotation_sidecar(rl.rotations));
  }
}

struct WarpArgs {
  std::string image, depth, calib, pose, out_prefix;
  bool crop = false;
};

int cmd_warp(const WarpArgs& a) {
  const ImageBuffer image = read_ppm(read_binary_file(a.image));
  const DepthRaster depth = read_pfm(read_binary_file(a.depth));
  const CalibData calib = parse_calib(read_text_file(a.calib));
  const CameraIntrinsics k = calib.intrinsics(image.width, image.height);
  const RigidPose pose = pose_spec_to_rigid(load_pose(a.pose));

  WarpResult result = synthesize_view(image, depth, k, pose);

  ImageBuffer out_image;
  try {
    out_image = fill_holes(result.image, result.mask);
  } catch (const AllHoles&) {
    out_image = result.image;
  }
  HoleMask out_mask = result.mask;
  if (a.crop) {
    out_image = crop_center(out_image, kCropW, kCropH);
    out_mask = crop_center(out_mask, kCropW, kCropH);
  }

  write_binary_file(a.out_prefix + ".ppm", write_ppm(out_image));
  write_binary_file(a.out_prefix + "_mask.pgm", write_pgm_mask(out_mask));
  char report[128];
  std::snprintf(report, sizeof(report), "%.6f %zu %zu\n", result.report.valid_fraction,
                result.report.holes_filled, result.report.depth_rejected);
  write_text_file(a.out_prefix + "_report.txt", report);
  return 0;
}

struct RelabelArgs {
  std::string labels, calib, pose, out;
  bool crop = false;
};

int cmd_relabel(const RelabelArgs& a) {
  const auto records = parse_label_file(read_text_file(a.labels));
  const CalibData calib = parse_calib(read_text_file(a.calib));
  CameraIntrinsics k = calib.intrinsics();
  if (a.crop) k = crop_intrinsics(k, kCropW, kCropH);
  const RigidPose pose = pose_spec_to_rigid(load_pose(a.pose));

  Relabeled rl;
  for (const LabelRecord& rec : records) {
    if (rec.is_dont_care()) {
      rl.records.push_back(rec);
      rl.rotations.push_back(RotationMatrix());
      continue;
    }
    Box3D box;
    box.center = kitti_location_to_center(rec.location, rec.h);
    box.h = rec.h;
    box.w = rec.w;
    box.l = rec.l;
    box.heading = Heading::yaw_only(rec.rotation_y);
    const Box3D moved = transform_box(box, pose);
    const RotationMatrix rot = moved.heading.matrix();

    LabelRecord out = rec;
    out.location = kitti_center_to_location(moved.center, moved.h);
    out.rotation_y = normalize_angle(extract_yaw(rot));
    out.alpha =
        normalize_angle(out.rotation_y - std::atan2(moved.center.x(), moved.center.z()));
    double truncation = 0;
    const Rect2D bbox = clamped_bbox(moved, k, &truncation);
    out.left = bbox.left;
    out.top = bbox.top;
    out.right = bbox.right;
    out.bottom = bbox.bottom;
    out.truncated = truncation;
    rl.records.push_back(out);
    rl.rotations.push_back(rot);
    if (!is_pure_yaw(rot)) rl.any_tilted = true;
  }
  write_labels_with_sidecar(a.out, rl);
  return 0;
}

struct CompensateArgs {
  std::string detections, calib, pose, out;
  bool apply_yaw = false;
};

int cmd_compensate(const CompensateArgs& a) {
  const auto records = parse_label_file(read_text_file(a.detections));
  parse_calib(read_text_file(a.calib));  // validated; the rebuild needs no K
  const PoseSpec pose = load_pose(a.pose);

  Relabeled rl;
  for (const LabelRecord& rec : records) {
    if (rec.is_dont_care()) {
      rl.records.push_back(rec);
      rl.rotations.push_back(RotationMatrix());
      continue;
    }
    LabelRecord out = rec;
    double yaw = rec.rotation_y;
    if (a.apply_yaw) yaw = normalize_angle(yaw + pose.yaw_deg * kDeg);
    out.rotation_y = yaw;
    const RotationMatrix rot =
        compose_r3d(pose.roll_deg * kDeg, yaw, pose.pitch_deg * kDeg);
    rl.records.push_back(out);
    rl.rotations.push_back(rot);
    if (!is_pure_yaw(rot)) rl.any_tilted = true;
  }
  write_labels_with_sidecar(a.out, rl);
  return 0;
}

struct EvalArgs {
  std::string det_dir, gt_dir, calib_dir, metric, out = ".";
  double iou = 0.7;
  int recall_points = 40;
  bool exact_tilted = false;
};

int cmd_eval(const EvalArgs& a) {
  EvalConfig cfg;
  cfg.iou_threshold = a.iou;
  cfg.recall_points = a.recall_points;
  cfg.exact_tilted = a.exact_tilted;
  std::vector<Metric> metrics;
  if (a.metric.empty())
    metrics = {Metric::AP3D, Metric::APBEV, Metric::AP2D};
  else
    metrics = {parse_metric(a.metric)};

  const auto entries = evaluate_dataset(a.det_dir, a.gt_dir, a.calib_dir, cfg, metrics);
  std::cout << format_ap_table(entries);
  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "ap.csv").string(), format_ap_csv(entries));
  return 0;
}

struct AblateArgs {
  std::string det_dir, gt_dir, calib_dir, out = ".";
  double iou = 0.7;
  int recall_points = 40;
};

int cmd_ablate(const AblateArgs& a) {
  const auto frames = load_eval_frames(a.det_dir, a.gt_dir, "");
  if (frames.empty()) throw Error("no frames found in " + a.gt_dir);

  // One camera for the whole set; KITTI sequences share intrinsics.
  const fs::path calib_path = fs::path(a.calib_dir) / (frames.front().id + ".txt");
  if (!fs::exists(calib_path)) throw MissingFrame(frames.front().id);
  const CameraIntrinsics k =
      parse_calib(read_text_file(calib_path.string())).intrinsics();

  std::vector<AblationFrame> ab;
  ab.reserve(frames.size());
  for (const auto& f : frames) ab.push_back({f.det.records, f.gt.records});

  EvalConfig cfg;
  cfg.iou_threshold = a.iou;
  cfg.recall_points = a.recall_points;
  const auto rows = run_ablation_table(ab, k, cfg);
  const std::string csv = format_ablation_csv(rows);
  std::cout << csv;
  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "ablation.csv").string(), csv);
  return 0;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  int frames = 50;
  std::string out = ".";
};

int cmd_synth_demo(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.frames = a.frames;
  const auto rows = run_sweep(cfg);
  const std::string summary = format_sweep_summary(rows);
  std::cout << summary;
  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "sweep.csv").string(), format_sweep_csv(rows));
  write_text_file((fs::path(a.out) / "summary.txt").string(), summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "camera-pose-shift synthesis, heading compensation and 3D detection scoring"};
  app.require_subcommand(1);

  WarpArgs wa;
  auto* warp = app.add_subcommand("warp", "synthesize a pose-shifted view");
  warp->add_option("--image", wa.image, "reference PPM image")->required();
  warp->add_option("--depth", wa.depth, "PFM depth map")->required();
  warp->add_option("--calib", wa.calib, "KITTI calib file")->required();
  warp->add_option("--pose", wa.pose, "pose spec file")->required();
  warp->add_option("--out-prefix", wa.out_prefix, "output prefix")->required();
  warp->add_flag("--crop", wa.crop, "center-crop outputs to 804x244");

  RelabelArgs ra;
  auto* relabel =
      app.add_subcommand("relabel", "re-express 3D labels under a camera pose change");
  relabel->add_option("--labels", ra.labels, "KITTI label file")->required();
  relabel->add_option("--calib", ra.calib, "KITTI calib file")->required();
  relabel->add_option("--pose", ra.pose, "pose spec file")->required();
  relabel->add_option("--out", ra.out, "output label file")->required();
  relabel->add_flag("--crop", ra.crop, "clamp 2D boxes to the 804x244 crop");

  CompensateArgs ca;
  auto* compensate =
      app.add_subcommand("compensate", "rebuild detection headings with pose roll/pitch");
  compensate->add_option("--detections", ca.detections, "detection label file")->required();
  compensate->add_option("--calib", ca.calib, "KITTI calib file")->required();
  compensate->add_option("--pose", ca.pose, "pose spec file")->required();
  compensate->add_option("--out", ca.out, "output label file")->required();
  compensate->add_flag("--apply-yaw", ca.apply_yaw, "add the pose yaw to each r_yaw");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "KITTI-style AP evaluation");
  eval->add_option("--det-dir", ea.det_dir, "detection label directory")->required();
  eval->add_option("--gt-dir", ea.gt_dir, "ground-truth label directory")->required();
  eval->add_option("--calib-dir", ea.calib_dir, "calib directory (optional)");
  eval->add_option("--iou", ea.iou, "IoU threshold (default 0.7)");
  eval->add_option("--recall-points", ea.recall_points, "40 or 11");
  eval->add_option("--metric", ea.metric, "ap3d|apbev|ap2d (default: all)");
  eval->add_flag("--exact-tilted", ea.exact_tilted,
                 "exact polytope 3D IoU for tilted boxes");
  eval->add_option("--out", ea.out, "output directory for ap.csv");

  AblateArgs aa;
  auto* ablate = app.add_subcommand("ablate", "factor-swap ablation table");
  ablate->add_option("--det-dir", aa.det_dir, "prediction label directory")->required();
  ablate->add_option("--gt-dir", aa.gt_dir, "ground-truth label directory")->required();
  ablate->add_option("--calib-dir", aa.calib_dir, "calib directory")->required();
  ablate->add_option("--iou", aa.iou, "IoU threshold (default 0.7)");
  ablate->add_option("--recall-points", aa.recall_points, "40 or 11");
  ablate->add_option("--out", aa.out, "output directory for ablation.csv");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth-demo", "synthetic degradation/recovery sweep");
  synth->add_option("--seed", sa.seed, "RNG seed (default 42)");
  synth->add_option("--frames", sa.frames, "frame count (default 50)");
  synth->add_option("--out", sa.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*warp) return cmd_warp(wa);
    if (*relabel) return cmd_relabel(ra);
    if (*compensate) return cmd_compensate(ca);
    if (*eval) return cmd_eval(ea);
    if (*ablate) return cmd_ablate(aa);
    if (*synth) return cmd_synth_demo(sa);
  } catch (const MissingFrame& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
