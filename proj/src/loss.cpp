#include "detkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detkit/iou.hpp"

namespace detkit {

namespace {

double sign_of(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

LossBreakdown scaled(LossBreakdown b, double denom, const LossWeights& w) {
  b.cls /= denom;
  b.l1 /= denom;
  b.diou /= denom;
  return finalize(b, w);
}

}  // namespace

LossBreakdown finalize(LossBreakdown b, const LossWeights& w) {
  b.total = w.cls * b.cls + w.l1 * b.l1 + w.iou * b.diou;
  return b;
}

LossBreakdown matched_pair_loss(const Prediction& pred, const GroundTruth& gt,
                                const MatchContext& ctx) {
  if (gt.label < 0 ||
      static_cast<std::size_t>(gt.label) >= pred.class_probs.size()) {
    throw std::out_of_range("matched_pair_loss: label outside the category set");
  }
  LossBreakdown b;
  b.cls = focal_pos_term(pred.class_probs[static_cast<std::size_t>(gt.label)]);
  b.l1 = l1_box_cost(pred.box, gt.box, ctx.extent);
  b.diou = diou_3d(pred.box, gt.box);
  return finalize(b, ctx.weights);
}

double background_loss(const Prediction& pred) {
  double total = 0.0;
  for (double p : pred.class_probs) total += focal_neg_term(p);
  return total;
}

FrameLossRaw frame_loss_raw(const StageOutput& stage,
                            const std::vector<GroundTruth>& gts,
                            const MatchContext& ctx) {
  FrameLossRaw raw;
  raw.n_gts = gts.size();
  const MatchResult assignment = match(stage.predictions, gts, ctx);
  for (const auto& [gt_idx, pred_idx] : assignment.pairs) {
    const LossBreakdown pair = matched_pair_loss(
        stage.predictions[static_cast<std::size_t>(pred_idx)],
        gts[static_cast<std::size_t>(gt_idx)], ctx);
    raw.sums.cls += pair.cls;
    raw.sums.l1 += pair.l1;
    raw.sums.diou += pair.diou;
  }
  for (int pred_idx : assignment.unmatched_preds) {
    raw.sums.cls +=
        background_loss(stage.predictions[static_cast<std::size_t>(pred_idx)]);
  }
  raw.sums = finalize(raw.sums, ctx.weights);
  return raw;
}

LossBreakdown frame_loss(const StageOutput& stage,
                         const std::vector<GroundTruth>& gts,
                         const MatchContext& ctx) {
  const FrameLossRaw raw = frame_loss_raw(stage, gts, ctx);
  const double denom = static_cast<double>(std::max<std::size_t>(1, raw.n_gts));
  return scaled(raw.sums, denom, ctx.weights);
}

LossBreakdown batch_loss(const std::vector<StageOutput>& frames,
                         const std::vector<std::vector<GroundTruth>>& gts,
                         const MatchContext& ctx) {
  if (frames.size() != gts.size()) {
    throw std::invalid_argument("batch_loss: frame/gt list size mismatch");
  }
  LossBreakdown pooled;
  std::size_t total_gts = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const FrameLossRaw raw = frame_loss_raw(frames[f], gts[f], ctx);
    pooled.cls += raw.sums.cls;
    pooled.l1 += raw.sums.l1;
    pooled.diou += raw.sums.diou;
    total_gts += raw.n_gts;
  }
  const double denom = static_cast<double>(std::max<std::size_t>(1, total_gts));
  return scaled(pooled, denom, ctx.weights);
}

LossBreakdown stacked_loss(const std::vector<StageOutput>& stages,
                           const std::vector<GroundTruth>& gts,
                           const MatchContext& ctx) {
  LossBreakdown total;
  for (const StageOutput& stage : stages) {
    const LossBreakdown stage_loss = frame_loss(stage, gts, ctx);
    total.cls += stage_loss.cls;
    total.l1 += stage_loss.l1;
    total.diou += stage_loss.diou;
    total.total += stage_loss.total;
  }
  return total;
}

std::array<double, 7> l1_grad(const Box3D& pred, const Box3D& gt,
                              const Extent3& extent) {
  validate(extent);
  const double sx = extent.span(0);
  const double sy = extent.span(1);
  const double sz = extent.span(2);
  std::array<double, 7> g{};
  g[0] = sign_of(pred.cx - gt.cx) / (6.0 * sx);
  g[1] = sign_of(pred.cy - gt.cy) / (6.0 * sy);
  g[2] = sign_of(pred.cz - gt.cz) / (6.0 * sz);
  g[3] = sign_of(pred.w - gt.w) / (6.0 * sy);
  g[4] = sign_of(pred.l - gt.l) / (6.0 * sx);
  g[5] = sign_of(pred.h - gt.h) / (6.0 * sz);
  // Smooth-L1 over s = sin(dyaw): |s| never exceeds 1, so the quadratic
  // branch applies everywhere and d/dyaw = s * cos(dyaw).
  const double dyaw = pred.yaw - gt.yaw;
  g[6] = std::sin(dyaw) * std::cos(dyaw);
  return g;
}

}  // namespace detkit
