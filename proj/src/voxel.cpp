#include "detkit/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "detkit/kernels.hpp"
#include "detkit/rng.hpp"

namespace detkit {

namespace {

// Snap quotients that land within one part in 1e9 of an integer before the
// ceiling, so extents authored as exact multiples of the voxel size (70.4 /
// 0.05) never gain a spurious extra cell to floating-point noise.
std::int64_t snapped_ceil(double q) {
  return static_cast<std::int64_t>(std::ceil(q - 1e-9));
}

}  // namespace

std::array<std::int64_t, 3> grid_dims(const VoxelGridSpec& spec) {
  validate(spec.extent);
  std::array<std::int64_t, 3> dims{};
  for (int axis = 0; axis < 3; ++axis) {
    if (!(spec.voxel_size[axis] > 0.0) || !std::isfinite(spec.voxel_size[axis])) {
      throw std::domain_error("grid_dims: voxel sizes must be positive and finite");
    }
    dims[axis] = snapped_ceil(spec.extent.span(axis) / spec.voxel_size[axis]);
    if (dims[axis] < 1) dims[axis] = 1;
  }
  if (dims[0] * dims[1] * dims[2] > (std::int64_t{1} << 31)) {
    throw std::domain_error("grid_dims: grid exceeds supported voxel count");
  }
  return dims;
}

VoxelMap assign_points(const std::vector<PointXYZI>& points,
                       const VoxelGridSpec& spec, std::size_t t,
                       std::uint64_t seed) {
  if (t < 1) throw std::domain_error("assign_points: cap must be >= 1");
  VoxelMap vmap;
  vmap.dims = grid_dims(spec);
  vmap.n_input = points.size();

  std::vector<std::int64_t> ids(points.size());
  if (!points.empty()) {
    kernels::VoxelIndexParams params{};
    for (int axis = 0; axis < 3; ++axis) {
      params.lo[axis] = spec.extent.lo[axis];
      params.hi[axis] = spec.extent.hi[axis];
      params.size[axis] = spec.voxel_size[axis];
      params.dims[axis] = vmap.dims[axis];
    }
    kernels::ops().voxel_indices(reinterpret_cast<const float*>(points.data()),
                                 points.size(), params, ids.data());
  }

  // Group point indices per voxel, preserving arrival order within a voxel.
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> groups;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (ids[i] < 0) {
      ++vmap.n_out_of_range;
      continue;
    }
    groups[ids[i]].push_back(static_cast<std::uint32_t>(i));
  }

  vmap.voxels.reserve(groups.size());
  for (auto& [linear_id, members] : groups) {
    Voxel voxel;
    voxel.linear_id = linear_id;
    const std::int64_t iz = linear_id % vmap.dims[2];
    const std::int64_t rest = linear_id / vmap.dims[2];
    voxel.index = {rest / vmap.dims[1], rest % vmap.dims[1], iz};
    voxel.raw_count = members.size();

    if (members.size() > t) {
      // Partial Fisher-Yates keyed by the voxel id: the kept subset depends
      // only on (seed, voxel, arrival order), not on map iteration order.
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(linear_id)));
      for (std::size_t k = 0; k < t; ++k) {
        const std::size_t j =
            k + static_cast<std::size_t>(rng.next_below(members.size() - k));
        std::swap(members[k], members[j]);
      }
      members.resize(t);
      std::sort(members.begin(), members.end());
      vmap.n_capped_away += voxel.raw_count - t;
    }

    voxel.points.reserve(members.size());
    for (std::uint32_t idx : members) voxel.points.push_back(points[idx]);
    vmap.n_retained += voxel.points.size();
    vmap.voxels.push_back(std::move(voxel));
  }

  std::sort(vmap.voxels.begin(), vmap.voxels.end(),
            [](const Voxel& a, const Voxel& b) { return a.linear_id < b.linear_id; });
  return vmap;
}

std::vector<VoxelFeature> mean_encode(const VoxelMap& vmap) {
  std::vector<VoxelFeature> features;
  features.reserve(vmap.voxels.size());
  for (const Voxel& voxel : vmap.voxels) {
    VoxelFeature f;
    f.index = voxel.index;
    f.linear_id = voxel.linear_id;
    for (const PointXYZI& p : voxel.points) {
      f.mean[0] += p.x;
      f.mean[1] += p.y;
      f.mean[2] += p.z;
      f.mean[3] += p.intensity;
    }
    const double count = static_cast<double>(voxel.points.size());
    for (double& v : f.mean) v /= count;
    features.push_back(f);
  }
  return features;
}

}  // namespace detkit
