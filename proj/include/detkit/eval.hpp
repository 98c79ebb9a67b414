#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detkit/kitti.hpp"
#include "detkit/voxel.hpp"

namespace detkit {

enum class OverlapMetric { k3D = 0, kBev = 1 };

const char* metric_name(OverlapMetric m);

struct ApResult {
  double ap = 0.0;   // percentage in [0, 100]
  std::size_t n_gts = 0;   // counted ground truths at this difficulty
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  bool no_gt_warning = false;  // AP forced to 0 because no gt was counted
};

// 11-point interpolated average precision: detections pooled over frames and
// sorted by descending score, each greedily matched to the highest-IoU
// unmatched same-category gt at or above the threshold. Ground truths harder
// than `difficulty` (or Ignored) absorb detections without scoring them.
ApResult ap_11(const std::vector<DetectionFrame>& frames,
               const std::string& category, double iou_threshold,
               Difficulty difficulty, OverlapMetric metric);

struct EvalConfig {
  std::string category = "Car";
  std::vector<double> thresholds{0.70, 0.75, 0.80};
  std::vector<std::uint64_t> noise_levels{0, 20, 100};
  double noise_margin = 0.2;
  std::uint64_t seed = 1;
};

struct ApRow {
  OverlapMetric metric = OverlapMetric::k3D;
  double threshold = 0.0;
  Difficulty difficulty = Difficulty::kEasy;
  ApResult result;
};

struct EvalReport {
  std::string category;
  std::vector<ApRow> rows;  // metric-major, then threshold, then difficulty

  // Mean over the three difficulties of one (metric, threshold) block.
  double map_of(OverlapMetric metric, double threshold) const;
};

EvalReport eval_suite(const std::vector<DetectionFrame>& frames,
                      const EvalConfig& config);

// Adds k uniform points inside each gt box expanded by `margin` meters per
// side, intensity uniform in [0, 1); deterministic in (seed, frame id, gt
// order) and independent of frame processing order. Original points are
// preserved verbatim.
DetectionFrame inject_noise(const DetectionFrame& frame, std::uint64_t k,
                            double margin, std::uint64_t seed);

struct NoiseRow {
  std::uint64_t k = 0;
  std::uint64_t points_before = 0;
  std::uint64_t points_after = 0;
  std::uint64_t points_added = 0;
  std::uint64_t nonempty_voxels = 0;
  std::uint64_t retained_points = 0;
  EvalReport report;
};

// Robustness protocol: for each configured noise level, inject points into
// every frame, re-voxelize the clouds, and re-run the AP suite.
std::vector<NoiseRow> noise_sweep(const std::vector<DetectionFrame>& frames,
                                  const VoxelGridSpec& grid_spec,
                                  std::size_t points_per_voxel,
                                  const EvalConfig& config);

// One "key value ..." record per metric, machine-readable.
std::string report_records(const EvalReport& report);
// Human-readable threshold x difficulty table.
std::string report_table(const EvalReport& report);
std::string noise_records(const std::vector<NoiseRow>& rows);

}  // namespace detkit
