#pragma once

#include <cstdint>

#include "detkit/box.hpp"

namespace detkit {

// Exact IoU of two axis-aligned footprints; yaw is snapped away via
// axis_align before overlap is measured.
double bev_iou_axis_aligned(const BevBox& a, const BevBox& b);

// Exact IoU of two oriented rectangles (Sutherland-Hodgman clipping +
// shoelace area).
double bev_iou_rotated(const BevBox& a, const BevBox& b);

// Volume IoU: rotated footprint intersection times vertical overlap.
double iou_3d_rotated(const Box3D& a, const Box3D& b);

// 1 - IoU + rho^2/c^2 where rho is the center distance and c the diagonal
// of the axis-aligned box enclosing all 16 corners. Value in [0, 2).
double diou_3d(const Box3D& pred, const Box3D& gt);

// Clips the corner quad of `subject` against the half-planes of `clip`.
Polygon2D clip_bev_boxes(const BevBox& subject, const BevBox& clip);

struct McEstimate {
  double iou = 0.0;
  double std_err = 0.0;       // sqrt(iou*(1-iou)/n_union); 1.0 when n_union=0
  std::uint64_t n_union = 0;
  std::uint64_t n_inter = 0;
};

// Rejection-sampling estimate of volume IoU over the joint axis-aligned
// bounding region of both boxes. Deterministic for a fixed seed.
McEstimate mc_iou_oracle(const Box3D& a, const Box3D& b, std::uint64_t n_samples,
                         std::uint64_t seed);

}  // namespace detkit
