#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "detkit/kernels.hpp"
#include "detkit/rng.hpp"

namespace detkit::kernels {
namespace {

TEST(Dispatch, ScalarAlwaysAvailable) {
  const Ops& scalar = scalar_ops();
  EXPECT_STREQ(scalar.name, "scalar");
  ASSERT_NE(scalar.count_points_in_pair, nullptr);
  ASSERT_NE(scalar.voxel_indices, nullptr);
  ASSERT_NE(scalar.aa_iou_against, nullptr);
}

TEST(Dispatch, BackendSwitchRoundTrip) {
  const Backend original = active_backend();
  EXPECT_TRUE(set_backend(Backend::kScalar));
  EXPECT_EQ(active_backend(), Backend::kScalar);
  EXPECT_STREQ(ops().name, "scalar");
  if (avx2_available()) {
    EXPECT_TRUE(set_backend(Backend::kAvx2));
    EXPECT_EQ(active_backend(), Backend::kAvx2);
    EXPECT_STREQ(ops().name, "avx2");
  } else {
    EXPECT_FALSE(set_backend(Backend::kAvx2));
    EXPECT_EQ(active_backend(), Backend::kScalar);
  }
  EXPECT_TRUE(set_backend(Backend::kAuto));
  EXPECT_TRUE(set_backend(original));
}

TEST(Dispatch, Avx2TableConsistent) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  const Ops* avx2 = avx2_ops();
  ASSERT_NE(avx2, nullptr);
  EXPECT_STREQ(avx2->name, "avx2");
}

TEST(MakeFrame, PrecomputesHalfExtents) {
  const BoxFrame f = make_frame(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0);
  EXPECT_DOUBLE_EQ(f.half_w, 1.0);
  EXPECT_DOUBLE_EQ(f.half_l, 2.0);
  EXPECT_DOUBLE_EQ(f.half_h, 3.0);
  EXPECT_DOUBLE_EQ(f.cos_yaw, 1.0);
  EXPECT_DOUBLE_EQ(f.sin_yaw, 0.0);
}

TEST(CountPoints, AxisAlignedContainment) {
  const BoxFrame box = make_frame(0, 0, 0, 2.0, 4.0, 2.0, 0.0);
  // Inside, on the face (closed interval), and outside.
  const double xs[3] = {0.0, 2.0, 2.1};
  const double ys[3] = {0.0, 1.0, 0.0};
  const double zs[3] = {0.0, 1.0, 0.0};
  const PairCounts counts =
      scalar_ops().count_points_in_pair(xs, ys, zs, 3, box, box);
  EXPECT_EQ(counts.in_union, 2u);
  EXPECT_EQ(counts.in_inter, 2u);
}

struct RandomData {
  std::vector<double> xs, ys, zs;
  std::vector<float> xyzi;
  std::vector<Aabb2> boxes;
};

RandomData make_random_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  RandomData data;
  data.xs.resize(n);
  data.ys.resize(n);
  data.zs.resize(n);
  data.xyzi.resize(4 * n);
  data.boxes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.xs[i] = rng.uniform(-8.0, 75.0);
    data.ys[i] = rng.uniform(-45.0, 45.0);
    data.zs[i] = rng.uniform(-4.0, 2.0);
    data.xyzi[4 * i + 0] = static_cast<float>(rng.uniform(-8.0, 75.0));
    data.xyzi[4 * i + 1] = static_cast<float>(rng.uniform(-45.0, 45.0));
    data.xyzi[4 * i + 2] = static_cast<float>(rng.uniform(-4.0, 2.0));
    data.xyzi[4 * i + 3] = static_cast<float>(rng.next_double());
    const double min_x = rng.uniform(-10.0, 10.0);
    const double min_y = rng.uniform(-10.0, 10.0);
    data.boxes[i] = {min_x, min_y, min_x + rng.uniform(0.1, 8.0),
                     min_y + rng.uniform(0.1, 8.0)};
  }
  return data;
}

// The AVX2 kernels must agree with the scalar reference bit for bit, on
// every length (to cover the vector tail) and across many random inputs.
TEST(Equivalence, CountPointsBitExact) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  const Ops& scalar = scalar_ops();
  const Ops& avx2 = *avx2_ops();
  Rng rng(555);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(300));
    const RandomData data = make_random_data(n, seed);
    const BoxFrame a =
        make_frame(rng.uniform(0.0, 60.0), rng.uniform(-30.0, 30.0),
                   rng.uniform(-2.0, 1.0), rng.uniform(0.5, 30.0),
                   rng.uniform(0.5, 40.0), rng.uniform(0.5, 4.0),
                   rng.uniform(-3.2, 3.2));
    const BoxFrame b =
        make_frame(rng.uniform(0.0, 60.0), rng.uniform(-30.0, 30.0),
                   rng.uniform(-2.0, 1.0), rng.uniform(0.5, 30.0),
                   rng.uniform(0.5, 40.0), rng.uniform(0.5, 4.0),
                   rng.uniform(-3.2, 3.2));
    const PairCounts cs = scalar.count_points_in_pair(data.xs.data(), data.ys.data(),
                                                      data.zs.data(), n, a, b);
    const PairCounts cv = avx2.count_points_in_pair(data.xs.data(), data.ys.data(),
                                                    data.zs.data(), n, a, b);
    EXPECT_EQ(cs.in_union, cv.in_union) << "seed " << seed;
    EXPECT_EQ(cs.in_inter, cv.in_inter) << "seed " << seed;
  }
}

TEST(Equivalence, VoxelIndicesBitExact) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  const Ops& scalar = scalar_ops();
  const Ops& avx2 = *avx2_ops();
  VoxelIndexParams params{};
  params.lo[0] = 0.0;
  params.lo[1] = -40.0;
  params.lo[2] = -3.0;
  params.hi[0] = 70.4;
  params.hi[1] = 40.0;
  params.hi[2] = 1.0;
  params.size[0] = 0.05;
  params.size[1] = 0.05;
  params.size[2] = 0.1;
  params.dims[0] = 1408;
  params.dims[1] = 1600;
  params.dims[2] = 40;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(500));
    const RandomData data = make_random_data(n, seed * 31);
    std::vector<std::int64_t> out_s(n, -7), out_v(n, -9);
    scalar.voxel_indices(data.xyzi.data(), n, params, out_s.data());
    avx2.voxel_indices(data.xyzi.data(), n, params, out_v.data());
    EXPECT_EQ(out_s, out_v) << "seed " << seed;
  }
}

TEST(Equivalence, AaIouBitExact) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  const Ops& scalar = scalar_ops();
  const Ops& avx2 = *avx2_ops();
  for (std::uint64_t seed = 7; seed < 17; ++seed) {
    Rng rng(seed * 13);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(200));
    const RandomData data = make_random_data(n, seed);
    const double qx = rng.uniform(-10.0, 10.0);
    const double qy = rng.uniform(-10.0, 10.0);
    const Aabb2 query{qx, qy, qx + rng.uniform(0.1, 8.0),
                      qy + rng.uniform(0.1, 8.0)};
    std::vector<double> out_s(n), out_v(n);
    scalar.aa_iou_against(data.boxes.data(), n, query, out_s.data());
    avx2.aa_iou_against(data.boxes.data(), n, query, out_v.data());
    // Bitwise comparison, not tolerance: memcmp over the output buffers.
    EXPECT_EQ(std::memcmp(out_s.data(), out_v.data(), n * sizeof(double)), 0)
        << "seed " << seed;
  }
}

TEST(VoxelKernel, BoundaryAndOutOfRange) {
  VoxelIndexParams params{};
  params.lo[0] = 0.0;
  params.lo[1] = 0.0;
  params.lo[2] = 0.0;
  params.hi[0] = 1.0;
  params.hi[1] = 1.0;
  params.hi[2] = 1.0;
  params.size[0] = 0.5;
  params.size[1] = 0.5;
  params.size[2] = 0.5;
  params.dims[0] = 2;
  params.dims[1] = 2;
  params.dims[2] = 2;
  const float xyzi[] = {
      0.25f, 0.25f, 0.25f, 0.0f,  // cell (0,0,0)
      0.75f, 0.25f, 0.75f, 0.0f,  // cell (1,0,1)
      1.0f,  0.5f,  0.5f,  0.0f,  // x on the max boundary: dropped
      -0.1f, 0.5f,  0.5f,  0.0f,  // below range: dropped
  };
  std::int64_t out[4];
  scalar_ops().voxel_indices(xyzi, 4, params, out);
  EXPECT_EQ(out[0], 0);
  EXPECT_EQ(out[1], (1 * 2 + 0) * 2 + 1);
  EXPECT_EQ(out[2], -1);
  EXPECT_EQ(out[3], -1);
}

}  // namespace
}  // namespace detkit::kernels
