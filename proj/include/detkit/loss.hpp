#pragma once

#include <array>
#include <vector>

#include "detkit/matcher.hpp"

namespace detkit {

// Unweighted loss terms plus the weighted total
// (total = w.cls*cls + w.l1*l1 + w.iou*diou).
struct LossBreakdown {
  double cls = 0.0;
  double l1 = 0.0;
  double diou = 0.0;
  double total = 0.0;
};

LossBreakdown finalize(LossBreakdown b, const LossWeights& w);

// Training loss of one matched (prediction, ground truth) pair: positive
// focal term on the target category, the L1 box term, and the rotated 3D
// DIoU term.
LossBreakdown matched_pair_loss(const Prediction& pred, const GroundTruth& gt,
                                const MatchContext& ctx);

// Negative focal term summed over every category: the supervision an
// unmatched (background) prediction receives.
double background_loss(const Prediction& pred);

// One detection stage of one frame.
struct StageOutput {
  std::vector<Prediction> predictions;
};

// Unnormalized sums plus the ground-truth count, for batch-level
// normalization.
struct FrameLossRaw {
  LossBreakdown sums;
  std::size_t n_gts = 0;
};

FrameLossRaw frame_loss_raw(const StageOutput& stage,
                            const std::vector<GroundTruth>& gts,
                            const MatchContext& ctx);

// Matches, sums matched-pair losses plus background terms for unmatched
// predictions, and divides by max(1, |gts|).
LossBreakdown frame_loss(const StageOutput& stage,
                         const std::vector<GroundTruth>& gts,
                         const MatchContext& ctx);

// Pools raw sums over frames and divides once by max(1, total gt count), so
// duplicating every frame of a batch leaves the value unchanged.
LossBreakdown batch_loss(const std::vector<StageOutput>& frames,
                         const std::vector<std::vector<GroundTruth>>& gts,
                         const MatchContext& ctx);

// Deep supervision: frame_loss summed over stages, each stage matched
// independently against the same ground truths.
LossBreakdown stacked_loss(const std::vector<StageOutput>& stages,
                           const std::vector<GroundTruth>& gts,
                           const MatchContext& ctx);

// Analytic gradient of l1_box_cost with respect to the prediction's
// (cx, cy, cz, w, l, h, yaw). sign(0) is taken as 0, so the gradient at the
// exact minimum is zero.
std::array<double, 7> l1_grad(const Box3D& pred, const Box3D& gt,
                              const Extent3& extent);

}  // namespace detkit
