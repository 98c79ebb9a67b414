#include <cmath>

#include "kernels_detail.hpp"

namespace detkit::kernels {

namespace {

PairCounts count_points_in_pair_scalar(const double* xs, const double* ys,
                                       const double* zs, std::size_t n,
                                       const BoxFrame& a, const BoxFrame& b) {
  PairCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = detail::point_in_frame(xs[i], ys[i], zs[i], a);
    const bool in_b = detail::point_in_frame(xs[i], ys[i], zs[i], b);
    c.in_union += (in_a || in_b) ? 1u : 0u;
    c.in_inter += (in_a && in_b) ? 1u : 0u;
  }
  return c;
}

void voxel_indices_scalar(const float* xyzi, std::size_t n,
                          const VoxelIndexParams& p, std::int64_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const float* pt = xyzi + 4 * i;
    out[i] = detail::voxel_index_of(pt[0], pt[1], pt[2], p);
  }
}

void aa_iou_against_scalar(const Aabb2* boxes, std::size_t n, const Aabb2& q,
                           double* out) {
  const double area_q = (q.max_x - q.min_x) * (q.max_y - q.min_y);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::aa_iou_one(boxes[i], q, area_q);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{count_points_in_pair_scalar, voxel_indices_scalar,
                         aa_iou_against_scalar, "scalar"};
  return table;
}

BoxFrame make_frame(double cx, double cy, double cz, double w, double l,
                    double h, double yaw) {
  return {cx, cy, cz, std::cos(yaw), std::sin(yaw), l / 2.0, w / 2.0, h / 2.0};
}

}  // namespace detkit::kernels
