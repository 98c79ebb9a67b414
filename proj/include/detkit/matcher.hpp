#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "detkit/box.hpp"

namespace detkit {

struct Prediction {
  Box3D box;
  std::vector<double> class_probs;  // one entry per category, each in [0,1]
};

struct GroundTruth {
  Box3D box;
  int label = 0;
};

// Per-term weights of the matching cost and training loss.
struct LossWeights {
  double cls = 2.0;
  double l1 = 5.0;
  double iou = 2.0;
};

// Scene context shared by cost and loss computations: the extent normalizes
// the L1 box term so centers and dimensions are dimensionless.
struct MatchContext {
  Extent3 extent;
  LossWeights weights;
};

inline constexpr double kFocalAlpha = 0.25;
inline constexpr double kFocalGamma = 2.0;
inline constexpr double kProbClamp = 1e-8;

// alpha*(1-p)^gamma * (-log p): the positive-example focal term.
double focal_pos_term(double p);
// (1-alpha)*p^gamma * (-log(1-p)): the negative-example focal term.
double focal_neg_term(double p);

// Matching cost for classifying as `label`: positive term minus negative
// term, strictly decreasing in the predicted probability.
double focal_cls_cost(const std::vector<double>& probs, int label);

// Smooth-L1 of sin(theta_p - theta_g); zero whenever the angles differ by a
// multiple of pi.
double sin_error(double theta_p, double theta_g);

// Mean absolute difference over (cx, cy, cz, w, l, h), each normalized by
// the extent span of its world axis (w by the y span, l by x, h by z), plus
// sin_error on the yaw pair.
double l1_box_cost(const Box3D& pred, const Box3D& gt, const Extent3& extent);

struct CostMatrix {
  std::size_t m = 0;  // rows: ground truths
  std::size_t n = 0;  // cols: predictions
  std::vector<double> cost;  // row-major, m*n entries

  double at(std::size_t i, std::size_t j) const { return cost[i * n + j]; }
};

// Entry (i, j) = w.cls*focal_cls_cost + w.l1*l1_box_cost +
// w.iou*(1 - bev_iou_axis_aligned). Throws std::invalid_argument when
// there are fewer predictions than ground truths.
CostMatrix match_cost_matrix(const std::vector<Prediction>& preds,
                             const std::vector<GroundTruth>& gts,
                             const MatchContext& ctx);

// Minimum-cost injective row->column assignment (shortest augmenting path);
// deterministic, scanning lowest column index first. Returns one column per
// row. Throws std::invalid_argument on m > n or non-finite entries.
std::vector<int> hungarian(const CostMatrix& costs);

double assignment_cost(const CostMatrix& costs, const std::vector<int>& cols);

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (gt index, pred index), by gt
  std::vector<int> unmatched_preds;        // ascending
  double total_cost = 0.0;
};

MatchResult match(const std::vector<Prediction>& preds,
                  const std::vector<GroundTruth>& gts, const MatchContext& ctx);

}  // namespace detkit
