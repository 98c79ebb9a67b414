#include "kernels_detail.hpp"

#ifdef DETKIT_WITH_AVX2

#include <immintrin.h>

#include <bit>
#include <limits>

namespace detkit::kernels {

namespace {

struct FrameConsts {
  __m256d cx, cy, cz;
  __m256d cos_yaw, sin_yaw;
  __m256d half_l, half_w, half_h;
};

FrameConsts broadcast(const BoxFrame& f) {
  return {_mm256_set1_pd(f.cx),      _mm256_set1_pd(f.cy),
          _mm256_set1_pd(f.cz),      _mm256_set1_pd(f.cos_yaw),
          _mm256_set1_pd(f.sin_yaw), _mm256_set1_pd(f.half_l),
          _mm256_set1_pd(f.half_w),  _mm256_set1_pd(f.half_h)};
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_and_pd(
      v, _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll)));
}

inline __m256d in_frame(__m256d x, __m256d y, __m256d z, const FrameConsts& f) {
  const __m256d dx = _mm256_sub_pd(x, f.cx);
  const __m256d dy = _mm256_sub_pd(y, f.cy);
  const __m256d dz = _mm256_sub_pd(z, f.cz);
  const __m256d lx = _mm256_add_pd(_mm256_mul_pd(f.cos_yaw, dx),
                                   _mm256_mul_pd(f.sin_yaw, dy));
  const __m256d ly = _mm256_sub_pd(_mm256_mul_pd(f.cos_yaw, dy),
                                   _mm256_mul_pd(f.sin_yaw, dx));
  __m256d ok = _mm256_cmp_pd(abs_pd(lx), f.half_l, _CMP_LE_OQ);
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(abs_pd(ly), f.half_w, _CMP_LE_OQ));
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(abs_pd(dz), f.half_h, _CMP_LE_OQ));
  return ok;
}

PairCounts count_points_in_pair_avx2(const double* xs, const double* ys,
                                     const double* zs, std::size_t n,
                                     const BoxFrame& a, const BoxFrame& b) {
  PairCounts c;
  const FrameConsts fa = broadcast(a);
  const FrameConsts fb = broadcast(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    const __m256d in_a = in_frame(x, y, z, fa);
    const __m256d in_b = in_frame(x, y, z, fb);
    const unsigned mu =
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(in_a, in_b)));
    const unsigned mi =
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_and_pd(in_a, in_b)));
    c.in_union += std::popcount(mu);
    c.in_inter += std::popcount(mi);
  }
  for (; i < n; ++i) {
    const bool in_a = detail::point_in_frame(xs[i], ys[i], zs[i], a);
    const bool in_b = detail::point_in_frame(xs[i], ys[i], zs[i], b);
    c.in_union += (in_a || in_b) ? 1u : 0u;
    c.in_inter += (in_a && in_b) ? 1u : 0u;
  }
  return c;
}

// One point per iteration with the x/y/z axes in lanes 0..2; lane 3 carries
// the (ignored) intensity channel.
void voxel_indices_avx2(const float* xyzi, std::size_t n,
                        const VoxelIndexParams& p, std::int64_t* out) {
  const __m256d lo = _mm256_set_pd(0.0, p.lo[2], p.lo[1], p.lo[0]);
  const __m256d size = _mm256_set_pd(1.0, p.size[2], p.size[1], p.size[0]);
  const __m256d dims = _mm256_set_pd(std::numeric_limits<double>::infinity(),
                                     static_cast<double>(p.dims[2]),
                                     static_cast<double>(p.dims[1]),
                                     static_cast<double>(p.dims[0]));
  const __m256d zero = _mm256_setzero_pd();
  const double dim_y = static_cast<double>(p.dims[1]);
  const double dim_z = static_cast<double>(p.dims[2]);
  alignas(32) double f[4];
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d pt = _mm256_cvtps_pd(_mm_loadu_ps(xyzi + 4 * i));
    const __m256d fx = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(pt, lo), size));
    const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(fx, zero, _CMP_GE_OQ),
                                     _mm256_cmp_pd(fx, dims, _CMP_LT_OQ));
    if ((_mm256_movemask_pd(ok) & 0x7) != 0x7) {
      out[i] = -1;
      continue;
    }
    _mm256_store_pd(f, fx);
    out[i] = static_cast<std::int64_t>((f[0] * dim_y + f[1]) * dim_z + f[2]);
  }
}

void aa_iou_against_avx2(const Aabb2* boxes, std::size_t n, const Aabb2& q,
                         double* out) {
  const double area_q_s = (q.max_x - q.min_x) * (q.max_y - q.min_y);
  const __m256d qminx = _mm256_set1_pd(q.min_x);
  const __m256d qminy = _mm256_set1_pd(q.min_y);
  const __m256d qmaxx = _mm256_set1_pd(q.max_x);
  const __m256d qmaxy = _mm256_set1_pd(q.max_y);
  const __m256d area_q = _mm256_set1_pd(area_q_s);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r0 = _mm256_loadu_pd(&boxes[i].min_x);
    const __m256d r1 = _mm256_loadu_pd(&boxes[i + 1].min_x);
    const __m256d r2 = _mm256_loadu_pd(&boxes[i + 2].min_x);
    const __m256d r3 = _mm256_loadu_pd(&boxes[i + 3].min_x);
    const __m256d t0 = _mm256_unpacklo_pd(r0, r1);
    const __m256d t1 = _mm256_unpackhi_pd(r0, r1);
    const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
    const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
    const __m256d minx = _mm256_permute2f128_pd(t0, t2, 0x20);
    const __m256d maxx = _mm256_permute2f128_pd(t0, t2, 0x31);
    const __m256d miny = _mm256_permute2f128_pd(t1, t3, 0x20);
    const __m256d maxy = _mm256_permute2f128_pd(t1, t3, 0x31);
    const __m256d iw =
        _mm256_max_pd(_mm256_sub_pd(_mm256_min_pd(maxx, qmaxx),
                                    _mm256_max_pd(minx, qminx)),
                      zero);
    const __m256d ih =
        _mm256_max_pd(_mm256_sub_pd(_mm256_min_pd(maxy, qmaxy),
                                    _mm256_max_pd(miny, qminy)),
                      zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area_b = _mm256_mul_pd(_mm256_sub_pd(maxx, minx),
                                         _mm256_sub_pd(maxy, miny));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(area_b, area_q), inter);
    const __m256d iou = _mm256_div_pd(inter, uni);
    const __m256d pos = _mm256_cmp_pd(inter, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(zero, iou, pos));
  }
  for (; i < n; ++i) {
    out[i] = detail::aa_iou_one(boxes[i], q, area_q_s);
  }
}

}  // namespace

namespace detail {

const Ops& avx2_ops_table() {
  static const Ops table{count_points_in_pair_avx2, voxel_indices_avx2,
                         aa_iou_against_avx2, "avx2"};
  return table;
}

}  // namespace detail

}  // namespace detkit::kernels

#endif  // DETKIT_WITH_AVX2
