#pragma once

#include <vector>

#include "detkit/box.hpp"

namespace detkit {

// Residual of a ground-truth box against a proposal box. Center offsets are
// normalized (x/y by the proposal's footprint diagonal, z by its height),
// dimensions are log-ratios, and dyaw is the raw angle difference — angle
// periodicity is the sine-error loss's job, not the codec's.
struct Residual7 {
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double dw = 0.0, dl = 0.0, dh = 0.0;
  double dyaw = 0.0;
};

// Footprint diagonal sqrt(w^2 + l^2) used to normalize the center offsets.
double proposal_diagonal(const Box3D& proposal);

// Throws std::domain_error when either box has non-positive dimensions.
Residual7 encode_box(const Box3D& gt, const Box3D& proposal);

// Exact algebraic inverse of encode_box.
Box3D decode_box(const Residual7& r, const Box3D& proposal);

// n identical whole-scene boxes: centered on the extent's centroid, spanning
// the full extent per axis, yaw 0. Throws std::domain_error when n < 1 or the
// extent is invalid.
std::vector<Box3D> init_proposals(const Extent3& extent, std::size_t n);

}  // namespace detkit
