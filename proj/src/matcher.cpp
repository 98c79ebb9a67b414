#include "detkit/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detkit/iou.hpp"

namespace detkit {

namespace {

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double smooth_l1(double x) {
  const double a = std::fabs(x);
  return a <= 1.0 ? 0.5 * x * x : a - 0.5;
}

}  // namespace

double focal_pos_term(double p) {
  p = clamp_prob(p);
  return kFocalAlpha * std::pow(1.0 - p, kFocalGamma) * (-std::log(p));
}

double focal_neg_term(double p) {
  p = clamp_prob(p);
  return (1.0 - kFocalAlpha) * std::pow(p, kFocalGamma) * (-std::log1p(-p));
}

double focal_cls_cost(const std::vector<double>& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    throw std::out_of_range("focal_cls_cost: label outside the category set");
  }
  const double p = probs[static_cast<std::size_t>(label)];
  return focal_pos_term(p) - focal_neg_term(p);
}

double sin_error(double theta_p, double theta_g) {
  return smooth_l1(std::sin(theta_p - theta_g));
}

double l1_box_cost(const Box3D& pred, const Box3D& gt, const Extent3& extent) {
  validate(extent);
  // w stretches along the box's local y axis and l along local x, so each is
  // normalized by the matching world-axis span.
  const double sx = extent.span(0);
  const double sy = extent.span(1);
  const double sz = extent.span(2);
  const double mean =
      (std::fabs(pred.cx - gt.cx) / sx + std::fabs(pred.cy - gt.cy) / sy +
       std::fabs(pred.cz - gt.cz) / sz + std::fabs(pred.w - gt.w) / sy +
       std::fabs(pred.l - gt.l) / sx + std::fabs(pred.h - gt.h) / sz) /
      6.0;
  return mean + sin_error(pred.yaw, gt.yaw);
}

CostMatrix match_cost_matrix(const std::vector<Prediction>& preds,
                             const std::vector<GroundTruth>& gts,
                             const MatchContext& ctx) {
  if (preds.size() < gts.size()) {
    throw std::invalid_argument(
        "match_cost_matrix: needs at least as many predictions as ground truths");
  }
  CostMatrix costs;
  costs.m = gts.size();
  costs.n = preds.size();
  costs.cost.resize(costs.m * costs.n);
  const LossWeights& w = ctx.weights;
  for (std::size_t i = 0; i < costs.m; ++i) {
    const GroundTruth& gt = gts[i];
    const BevBox gt_bev = to_bev(gt.box);
    for (std::size_t j = 0; j < costs.n; ++j) {
      const Prediction& pred = preds[j];
      const double cls = focal_cls_cost(pred.class_probs, gt.label);
      const double l1 = l1_box_cost(pred.box, gt.box, ctx.extent);
      const double iou = 1.0 - bev_iou_axis_aligned(to_bev(pred.box), gt_bev);
      costs.cost[i * costs.n + j] = w.cls * cls + w.l1 * l1 + w.iou * iou;
    }
  }
  return costs;
}

// Shortest-augmenting-path assignment with dual potentials. Columns are
// scanned in ascending order and ties keep the earlier column, so the result
// is deterministic.
std::vector<int> hungarian(const CostMatrix& costs) {
  const std::size_t m = costs.m;
  const std::size_t n = costs.n;
  if (m > n) {
    throw std::invalid_argument("hungarian: more rows than columns");
  }
  for (double c : costs.cost) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("hungarian: non-finite cost entry");
    }
  }
  if (m == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m, 0.0), v(n, 0.0), shortest(n);
  std::vector<int> col_of_row(m, -1), row_of_col(n, -1), path(n, -1);
  std::vector<char> scanned_row(m), scanned_col(n);

  for (std::size_t cur = 0; cur < m; ++cur) {
    std::fill(scanned_row.begin(), scanned_row.end(), 0);
    std::fill(scanned_col.begin(), scanned_col.end(), 0);
    std::fill(shortest.begin(), shortest.end(), kInf);

    double min_val = 0.0;
    int sink = -1;
    std::size_t i = cur;
    while (sink == -1) {
      scanned_row[i] = 1;
      std::size_t best_col = n;
      double lowest = kInf;
      for (std::size_t j = 0; j < n; ++j) {
        if (scanned_col[j]) continue;
        const double r = min_val + costs.at(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = static_cast<int>(i);
          shortest[j] = r;
        }
        if (shortest[j] < lowest) {
          lowest = shortest[j];
          best_col = j;
        }
      }
      if (best_col == n) {
        throw std::logic_error("hungarian: no augmenting path");
      }
      min_val = lowest;
      scanned_col[best_col] = 1;
      if (row_of_col[best_col] == -1) {
        sink = static_cast<int>(best_col);
      } else {
        i = static_cast<std::size_t>(row_of_col[best_col]);
      }
    }

    u[cur] += min_val;
    for (std::size_t r = 0; r < m; ++r) {
      if (scanned_row[r] && r != cur) {
        u[r] += min_val - shortest[static_cast<std::size_t>(col_of_row[r])];
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (scanned_col[j]) v[j] -= min_val - shortest[j];
    }

    int j = sink;
    for (;;) {
      const int r = path[static_cast<std::size_t>(j)];
      row_of_col[static_cast<std::size_t>(j)] = r;
      std::swap(col_of_row[static_cast<std::size_t>(r)], j);
      if (static_cast<std::size_t>(r) == cur) break;
    }
  }
  return col_of_row;
}

double assignment_cost(const CostMatrix& costs, const std::vector<int>& cols) {
  double total = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    total += costs.at(i, static_cast<std::size_t>(cols[i]));
  }
  return total;
}

MatchResult match(const std::vector<Prediction>& preds,
                  const std::vector<GroundTruth>& gts, const MatchContext& ctx) {
  const CostMatrix costs = match_cost_matrix(preds, gts, ctx);
  const std::vector<int> cols = hungarian(costs);

  MatchResult result;
  result.total_cost = assignment_cost(costs, cols);
  std::vector<char> used(preds.size(), 0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    result.pairs.emplace_back(static_cast<int>(i), cols[i]);
    used[static_cast<std::size_t>(cols[i])] = 1;
  }
  for (std::size_t j = 0; j < preds.size(); ++j) {
    if (!used[j]) result.unmatched_preds.push_back(static_cast<int>(j));
  }
  return result;
}

}  // namespace detkit
