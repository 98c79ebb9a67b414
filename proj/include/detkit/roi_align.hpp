#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detkit/box.hpp"

namespace detkit {

// Dense BEV feature grid. value(ix, iy, c) sits at world position
// (origin_x + (ix+0.5)*cell_size, origin_y + (iy+0.5)*cell_size); values are
// stored row-major with ix outermost and the channel innermost.
struct FeatureGrid {
  std::int64_t size_x = 0;
  std::int64_t size_y = 0;
  std::int64_t channels = 0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 1.0;
  std::vector<double> values;

  double at(std::int64_t ix, std::int64_t iy, std::int64_t c) const {
    return values[(ix * size_y + iy) * channels + c];
  }
  double& at(std::int64_t ix, std::int64_t iy, std::int64_t c) {
    return values[(ix * size_y + iy) * channels + c];
  }
};

// Throws std::domain_error on non-positive dims/cell size or a value buffer
// of the wrong length.
void validate(const FeatureGrid& grid);

// S x S x C patch sampled under an oriented box, row-major with the bin's
// heading-axis coordinate outermost and the channel innermost.
struct RoiPatch {
  std::int64_t s = 0;
  std::int64_t channels = 0;
  std::vector<double> values;

  double at(std::int64_t bx, std::int64_t by, std::int64_t c) const {
    return values[(bx * s + by) * channels + c];
  }
};

// Divides the box footprint into s x s bins in the box's local frame and
// bilinearly interpolates the grid at each bin center (one sample per bin);
// samples outside the grid read zero. Throws std::domain_error when s < 1 or
// the box is invalid.
RoiPatch rotated_roi_align(const FeatureGrid& grid, const BevBox& box,
                           std::int64_t s);

// Binary tensor fixture format: magic "DKFG", u32 version, i64 size_x/size_y/
// channels, f64 origin_x/origin_y/cell_size, then values as f32 row-major.
void save_feature_grid(const std::string& path, const FeatureGrid& grid);
FeatureGrid load_feature_grid(const std::string& path);

}  // namespace detkit
