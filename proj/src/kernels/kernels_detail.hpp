#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "detkit/kernels.hpp"

// Per-element reference formulas shared by the scalar backend (main loop) and
// the SIMD backends (tail elements). Each vector kernel performs these exact
// IEEE operations per lane, so the backends agree bit for bit.

namespace detkit::kernels::detail {

inline bool point_in_frame(double x, double y, double z, const BoxFrame& f) {
  const double dx = x - f.cx;
  const double dy = y - f.cy;
  const double dz = z - f.cz;
  const double lx = f.cos_yaw * dx + f.sin_yaw * dy;
  const double ly = f.cos_yaw * dy - f.sin_yaw * dx;
  return std::fabs(lx) <= f.half_l && std::fabs(ly) <= f.half_w &&
         std::fabs(dz) <= f.half_h;
}

inline std::int64_t voxel_index_of(float x, float y, float z,
                                   const VoxelIndexParams& p) {
  const double fx = std::floor((static_cast<double>(x) - p.lo[0]) / p.size[0]);
  const double fy = std::floor((static_cast<double>(y) - p.lo[1]) / p.size[1]);
  const double fz = std::floor((static_cast<double>(z) - p.lo[2]) / p.size[2]);
  if (!(fx >= 0.0 && fx < static_cast<double>(p.dims[0]))) return -1;
  if (!(fy >= 0.0 && fy < static_cast<double>(p.dims[1]))) return -1;
  if (!(fz >= 0.0 && fz < static_cast<double>(p.dims[2]))) return -1;
  const double id = (fx * static_cast<double>(p.dims[1]) + fy) *
                        static_cast<double>(p.dims[2]) +
                    fz;
  return static_cast<std::int64_t>(id);
}

inline double aa_iou_one(const Aabb2& b, const Aabb2& q, double area_q) {
  const double iw =
      std::max(std::min(b.max_x, q.max_x) - std::max(b.min_x, q.min_x), 0.0);
  const double ih =
      std::max(std::min(b.max_y, q.max_y) - std::max(b.min_y, q.min_y), 0.0);
  const double inter = iw * ih;
  if (!(inter > 0.0)) return 0.0;
  const double area_b = (b.max_x - b.min_x) * (b.max_y - b.min_y);
  return inter / (area_b + area_q - inter);
}

#ifdef DETKIT_WITH_AVX2
const Ops& avx2_ops_table();
#endif

}  // namespace detkit::kernels::detail
