#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mono3d/eval.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

// The independently-predicted box components a monocular detector regresses:
// projected 3D center, depth, yaw, box size, plus the assembled 3D location.
struct FactorSet {
  Vec2 projected_center = Vec2::Zero();  // pixels
  double depth = 0.0;                    // z_3d, meters
  double yaw = 0.0;                      // r_yaw, radians
  double h = 0, w = 0, l = 0;            // BB size S
  std::optional<Vec3> location_3d;       // overrides projected_center+depth
};

enum class Factor { BBSize, Projected3D, Yaw, Location3D, Depth };
enum class SwapDirection { PredWithGtFactor, GtWithPredFactor };

struct SwapSpec {
  Factor factor;
  SwapDirection direction;
};

const char* factor_name(Factor f);
const char* direction_name(SwapDirection d);

// Splits a record into factors. location_3d is kept, so recompose(decompose)
// reproduces the box exactly.
FactorSet decompose(const LabelRecord& rec, const CameraIntrinsics& k);

// center = location_3d when present, otherwise backproject_center(K,
// projected_center, depth); heading YawOnly(yaw).
Box3D recompose(const FactorSet& f, const CameraIntrinsics& k);

// Copies the named factor from src into dst. Projected3D/Depth swaps clear
// location_3d so the mixed set recombines through the back-projection route.
void apply_factor(FactorSet& dst, const FactorSet& src, Factor factor);

struct AblationFrame {
  std::vector<LabelRecord> preds;  // scored
  std::vector<LabelRecord> gts;
};

// Predictions are paired to GTs by greedy 2D IoU >= 0.3 (descending score);
// the named factor is copied across per spec.direction; unmatched predictions
// pass through; rebuilt boxes run through the evaluator. Returns per-tier AP
// for cfg.metric, or nullopt when the direction is GtWithPredFactor and no
// pair matched anywhere (vacuous swap).
std::optional<std::vector<ApEntry>> swap_and_evaluate(
    const std::vector<AblationFrame>& frames, const SwapSpec& spec,
    const CameraIntrinsics& k, const EvalConfig& cfg);

struct AblationRow {
  std::string factor;     // "baseline" or factor name
  std::string direction;  // "-", "pred_with_gt", "gt_with_pred"
  Difficulty tier;
  std::optional<double> ap;  // fraction; nullopt = n/a
};

// Baseline row plus one row per (factor, direction) pair.
std::vector<AblationRow> run_ablation_table(const std::vector<AblationFrame>& frames,
                                            const CameraIntrinsics& k,
                                            const EvalConfig& cfg);

std::string format_ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace mono3d
