#include "mono3d/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace mono3d {

const char* factor_name(Factor f) {
  switch (f) {
    case Factor::BBSize: return "bb_size";
    case Factor::Projected3D: return "projected3d";
    case Factor::Yaw: return "yaw";
    case Factor::Location3D: return "location3d";
    case Factor::Depth: return "depth";
  }
  return "?";
}

const char* direction_name(SwapDirection d) {
  return d == SwapDirection::PredWithGtFactor ? "pred_with_gt" : "gt_with_pred";
}

FactorSet decompose(const LabelRecord& rec, const CameraIntrinsics& k) {
  FactorSet f;
  const Vec3 center = kitti_location_to_center(rec.location, rec.h);
  f.projected_center = project(k, center);  // BehindCamera when Z <= 0
  f.depth = center.z();
  f.yaw = rec.rotation_y;
  f.h = rec.h;
  f.w = rec.w;
  f.l = rec.l;
  f.location_3d = center;
  return f;
}

Box3D recompose(const FactorSet& f, const CameraIntrinsics& k) {
  Box3D box;
  box.center = f.location_3d ? *f.location_3d
                             : backproject_center(k, f.projected_center, f.depth);
  box.h = f.h;
  box.w = f.w;
  box.l = f.l;
  box.heading = Heading::yaw_only(f.yaw);
  return box;
}

void apply_factor(FactorSet& dst, const FactorSet& src, Factor factor) {
  switch (factor) {
    case Factor::BBSize:
      dst.h = src.h;
      dst.w = src.w;
      dst.l = src.l;
      break;
    case Factor::Projected3D:
      dst.projected_center = src.projected_center;
      dst.location_3d.reset();
      break;
    case Factor::Yaw:
      dst.yaw = src.yaw;
      break;
    case Factor::Location3D:
      dst.location_3d = src.location_3d;
      break;
    case Factor::Depth:
      dst.depth = src.depth;
      dst.location_3d.reset();
      break;
  }
}

namespace {

Rect2D record_rect(const LabelRecord& r) { return {r.left, r.top, r.right, r.bottom}; }

// Greedy 2D-IoU pairing at threshold 0.3, descending prediction score.
// Returns pred index -> gt index (or npos).
std::vector<std::size_t> pair_predictions(const std::vector<LabelRecord>& preds,
                                          const std::vector<LabelRecord>& gts) {
  constexpr double kPairThreshold = 0.3;
  const std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> assignment(preds.size(), npos);

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return preds[i].score.value_or(0) > preds[j].score.value_or(0);
  });

  std::vector<bool> taken(gts.size(), false);
  for (std::size_t pi : order) {
    double best = -1.0;
    std::size_t best_gt = npos;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].is_dont_care()) continue;
      const double v = iou_2d(record_rect(preds[pi]), record_rect(gts[g]));
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt != npos && best >= kPairThreshold) {
      taken[best_gt] = true;
      assignment[pi] = best_gt;
    }
  }
  return assignment;
}

LabelRecord rebuild_record(const LabelRecord& base, const Box3D& box,
                           const CameraIntrinsics& k) {
  LabelRecord out = base;
  out.h = box.h;
  out.w = box.w;
  out.l = box.l;
  out.location = kitti_center_to_location(box.center, box.h);
  out.rotation_y = box.heading.yaw();
  (void)k;
  return out;
}

}  // namespace

std::optional<std::vector<ApEntry>> swap_and_evaluate(
    const std::vector<AblationFrame>& frames, const SwapSpec& spec,
    const CameraIntrinsics& k, const EvalConfig& cfg) {
  std::vector<EvalFrame> eval_frames;
  eval_frames.reserve(frames.size());
  std::size_t matched_pairs = 0;

  int frame_no = 0;
  for (const auto& frame : frames) {
    EvalFrame ef;
    ef.id = std::to_string(frame_no++);
    ef.gt.records = frame.gts;

    const auto assignment = pair_predictions(frame.preds, frame.gts);
    const std::size_t npos = static_cast<std::size_t>(-1);

    if (spec.direction == SwapDirection::PredWithGtFactor) {
      for (std::size_t pi = 0; pi < frame.preds.size(); ++pi) {
        LabelRecord det = frame.preds[pi];
        if (assignment[pi] != npos) {
          ++matched_pairs;
          FactorSet pf = decompose(frame.preds[pi], k);
          const FactorSet gf = decompose(frame.gts[assignment[pi]], k);
          apply_factor(pf, gf, spec.factor);
          det = rebuild_record(det, recompose(pf, k), k);
        }
        ef.det.records.push_back(det);
      }
    } else {
      // GT list with the predicted factor substituted per matched pair;
      // unmatched GTs pass through as perfect detections.
      std::vector<std::size_t> gt_to_pred(frame.gts.size(), npos);
      for (std::size_t pi = 0; pi < frame.preds.size(); ++pi)
        if (assignment[pi] != npos) gt_to_pred[assignment[pi]] = pi;
      for (std::size_t g = 0; g < frame.gts.size(); ++g) {
        if (frame.gts[g].is_dont_care()) continue;
        LabelRecord det = frame.gts[g];
        det.score = 1.0;
        if (gt_to_pred[g] != npos) {
          ++matched_pairs;
          FactorSet gf = decompose(frame.gts[g], k);
          const FactorSet pf = decompose(frame.preds[gt_to_pred[g]], k);
          apply_factor(gf, pf, spec.factor);
          det = rebuild_record(det, recompose(gf, k), k);
          det.score = frame.preds[gt_to_pred[g]].score.value_or(1.0);
        }
        ef.det.records.push_back(det);
      }
    }
    eval_frames.push_back(std::move(ef));
  }

  if (spec.direction == SwapDirection::GtWithPredFactor && matched_pairs == 0)
    return std::nullopt;

  return evaluate_frames(eval_frames, cfg, {cfg.metric});
}

std::vector<AblationRow> run_ablation_table(const std::vector<AblationFrame>& frames,
                                            const CameraIntrinsics& k,
                                            const EvalConfig& cfg) {
  std::vector<AblationRow> rows;

  // Baseline: predictions as-is.
  {
    std::vector<EvalFrame> eval_frames;
    int frame_no = 0;
    for (const auto& frame : frames) {
      EvalFrame ef;
      ef.id = std::to_string(frame_no++);
      ef.gt.records = frame.gts;
      ef.det.records = frame.preds;
      eval_frames.push_back(std::move(ef));
    }
    const auto entries = evaluate_frames(eval_frames, cfg, {cfg.metric});
    for (const auto& e : entries)
      rows.push_back({"baseline", "-", e.tier, e.ap});
  }

  static constexpr Factor kFactors[] = {Factor::BBSize, Factor::Projected3D,
                                        Factor::Yaw, Factor::Location3D, Factor::Depth};
  for (SwapDirection dir :
       {SwapDirection::PredWithGtFactor, SwapDirection::GtWithPredFactor}) {
    for (Factor f : kFactors) {
      const auto entries = swap_and_evaluate(frames, {f, dir}, k, cfg);
      for (int t = 0; t < 3; ++t) {
        AblationRow row;
        row.factor = factor_name(f);
        row.direction = direction_name(dir);
        row.tier = static_cast<Difficulty>(t);
        if (entries) row.ap = (*entries)[t].ap;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string format_ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "factor,direction,tier,ap\n";
  char buf[160];
  for (const auto& r : rows) {
    int len;
    if (r.ap)
      len = std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.2f\n", r.factor.c_str(),
                          r.direction.c_str(), difficulty_name(r.tier), *r.ap * 100.0);
    else
      len = std::snprintf(buf, sizeof(buf), "%s,%s,%s,n/a\n", r.factor.c_str(),
                          r.direction.c_str(), difficulty_name(r.tier));
    out.append(buf, len);
  }
  return out;
}

}  // namespace mono3d
