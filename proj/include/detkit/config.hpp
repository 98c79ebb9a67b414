#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "detkit/box.hpp"
#include "detkit/eval.hpp"
#include "detkit/matcher.hpp"
#include "detkit/voxel.hpp"

namespace detkit {

// Pipeline configuration. Defaults are the reference KITTI setup: extent
// [0,70.4] x [-40,40] x [-3,1] m, voxel (0.05, 0.05, 0.1) m, 5 points per
// voxel, 100 proposals, pooling resolution 7, weights (2.0, 5.0, 2.0),
// thresholds {0.70, 0.75, 0.80}, noise levels {0, 20, 100}.
struct RunConfig {
  Extent3 extent{{0.0, -40.0, -3.0}, {70.4, 40.0, 1.0}};
  std::array<double, 3> voxel_size{0.05, 0.05, 0.1};
  std::size_t max_points_per_voxel = 5;
  std::size_t num_proposals = 100;
  std::int64_t roi_resolution = 7;
  LossWeights weights;
  std::string category = "Car";
  std::vector<double> iou_thresholds{0.70, 0.75, 0.80};
  std::vector<std::uint64_t> noise_levels{0, 20, 100};
  double noise_margin = 0.2;
  std::uint64_t seed = 1;

  VoxelGridSpec grid_spec() const { return {extent, voxel_size}; }
  MatchContext match_context() const { return {extent, weights}; }
  EvalConfig eval_config() const {
    return {category, iou_thresholds, noise_levels, noise_margin, seed};
  }
};

// Simple "key = value" config text ('#' comments, blank lines allowed).
// Throws std::runtime_error with the line number on malformed lines or
// unknown keys. Keys: extent_min, extent_max, voxel_size (comma triples),
// max_points_per_voxel, num_proposals, roi_resolution, lambda_cls,
// lambda_l1, lambda_iou, category, iou_thresholds, noise_levels
// (comma lists), noise_margin, seed.
void apply_config_text(const std::string& text, RunConfig& config);
void apply_config_file(const std::string& path, RunConfig& config);

// Parses a single "key" / "value" pair as apply_config_text would.
void apply_config_entry(const std::string& key, const std::string& value,
                        RunConfig& config);

}  // namespace detkit
