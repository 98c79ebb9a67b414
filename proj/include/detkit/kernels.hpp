#pragma once

#include <cstddef>
#include <cstdint>

// Runtime-dispatched inner-loop kernels. Every kernel has a scalar reference
// implementation and may have an AVX2 variant; variants are required to be
// bit-identical to the reference (same IEEE operations per element, no FMA
// contraction), which the equivalence tests assert exactly.

namespace detkit::kernels {

// Precomputed test frame of an oriented 3D box.
struct BoxFrame {
  double cx, cy, cz;
  double cos_yaw, sin_yaw;
  double half_l, half_w, half_h;
};

struct PairCounts {
  std::uint64_t in_union = 0;
  std::uint64_t in_inter = 0;
};

// Grid geometry for per-point voxel index assignment.
struct VoxelIndexParams {
  double lo[3];
  double hi[3];
  double size[3];
  std::int64_t dims[3];
};

// Axis-aligned footprint as (min_x, min_y, max_x, max_y).
struct Aabb2 {
  double min_x, min_y, max_x, max_y;
};

// Counts points inside box a or b (union) and inside both (intersection).
// Containment uses closed intervals in each box's local frame.
using CountPointsInPairFn = PairCounts (*)(const double* xs, const double* ys,
                                           const double* zs, std::size_t n,
                                           const BoxFrame& a, const BoxFrame& b);

// Maps packed (x,y,z,intensity) float points to linear voxel ids, -1 when
// out of range. Intervals are half-open [lo, hi) per axis.
using VoxelIndexFn = void (*)(const float* xyzi, std::size_t n,
                              const VoxelIndexParams& params, std::int64_t* out);

// IoU of one query footprint against a batch of footprints.
using AaIouFn = void (*)(const Aabb2* boxes, std::size_t n, const Aabb2& query,
                         double* out);

struct Ops {
  CountPointsInPairFn count_points_in_pair;
  VoxelIndexFn voxel_indices;
  AaIouFn aa_iou_against;
  const char* name;
};

enum class Backend { kAuto, kScalar, kAvx2 };

// Active kernel table. Defaults to the best backend the CPU supports;
// the DETKIT_KERNELS environment variable (scalar|avx2) overrides.
const Ops& ops();

// Force a backend; returns false (leaving the table unchanged) when the
// backend is unavailable on this CPU/build.
bool set_backend(Backend backend);
Backend active_backend();
bool avx2_available();

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when not compiled in

BoxFrame make_frame(double cx, double cy, double cz, double w, double l,
                    double h, double yaw);

}  // namespace detkit::kernels
