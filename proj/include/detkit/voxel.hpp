#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "detkit/box.hpp"

namespace detkit {

// One LiDAR return, matching the on-disk point layout (and the packed float
// buffer the kernels consume).
struct PointXYZI {
  float x = 0.0f, y = 0.0f, z = 0.0f, intensity = 0.0f;
};
static_assert(sizeof(PointXYZI) == 16);

struct VoxelGridSpec {
  Extent3 extent;
  std::array<double, 3> voxel_size{0.0, 0.0, 0.0};
};

// Ceiling-divided cell counts per axis. Throws std::domain_error on a
// non-positive extent span or voxel size.
std::array<std::int64_t, 3> grid_dims(const VoxelGridSpec& spec);

struct Voxel {
  std::array<std::int64_t, 3> index{0, 0, 0};  // (ix, iy, iz)
  std::int64_t linear_id = 0;                  // (ix*Sy + iy)*Sz + iz
  std::vector<PointXYZI> points;               // at most T, arrival order
  std::uint64_t raw_count = 0;                 // before capping
};

// Sparse voxel map: only non-empty voxels, ordered by ascending linear id.
struct VoxelMap {
  std::array<std::int64_t, 3> dims{0, 0, 0};
  std::vector<Voxel> voxels;
  std::uint64_t n_input = 0;
  std::uint64_t n_retained = 0;
  std::uint64_t n_capped_away = 0;
  std::uint64_t n_out_of_range = 0;
};

// Bins in-range points into voxels ([lo, hi) intervals per axis; points at
// the max boundary are dropped) and caps each voxel at T points. Over-full
// voxels keep a uniform random subset of size T drawn by a per-voxel seeded
// partial Fisher-Yates shuffle, so the result is reproducible for a fixed
// seed and independent of processing order. Throws std::domain_error when
// T < 1.
VoxelMap assign_points(const std::vector<PointXYZI>& points,
                       const VoxelGridSpec& spec, std::size_t t,
                       std::uint64_t seed);

struct VoxelFeature {
  std::array<std::int64_t, 3> index{0, 0, 0};
  std::int64_t linear_id = 0;
  std::array<double, 4> mean{0.0, 0.0, 0.0, 0.0};  // (x, y, z, intensity)
};

// Per-voxel mean of the retained points' records; empty voxels are absent by
// construction.
std::vector<VoxelFeature> mean_encode(const VoxelMap& vmap);

}  // namespace detkit
