#include "detkit/iou.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "detkit/kernels.hpp"
#include "detkit/rng.hpp"

namespace detkit {

namespace {

// Signed distance proxy: positive when p lies left of the directed edge a->b.
double edge_side(Point2 a, Point2 b, Point2 p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

Point2 intersect(Point2 p, Point2 q, double sp, double sq) {
  const double t = sp / (sp - sq);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

double clipped_area(const BevBox& a, const BevBox& b) {
  const Polygon2D poly = clip_bev_boxes(a, b);
  return std::max(polygon_area(poly), 0.0);
}

struct ZInterval {
  double lo, hi;
};

ZInterval z_interval(const Box3D& b) {
  return {b.cz - b.h / 2.0, b.cz + b.h / 2.0};
}

struct Aabb3 {
  double lo[3];
  double hi[3];
};

Aabb3 corner_aabb(const Box3D& b) {
  Aabb3 box{};
  const auto quad = bev_corners(to_bev(b));
  box.lo[0] = box.hi[0] = quad[0].x;
  box.lo[1] = box.hi[1] = quad[0].y;
  for (const Point2& p : quad) {
    box.lo[0] = std::min(box.lo[0], p.x);
    box.hi[0] = std::max(box.hi[0], p.x);
    box.lo[1] = std::min(box.lo[1], p.y);
    box.hi[1] = std::max(box.hi[1], p.y);
  }
  const ZInterval z = z_interval(b);
  box.lo[2] = z.lo;
  box.hi[2] = z.hi;
  return box;
}

Aabb3 merge(const Aabb3& a, const Aabb3& b) {
  Aabb3 out{};
  for (int axis = 0; axis < 3; ++axis) {
    out.lo[axis] = std::min(a.lo[axis], b.lo[axis]);
    out.hi[axis] = std::max(a.hi[axis], b.hi[axis]);
  }
  return out;
}

}  // namespace

Polygon2D clip_bev_boxes(const BevBox& subject, const BevBox& clip) {
  const auto subject_quad = bev_corners(subject);
  const auto clip_quad = bev_corners(clip);

  Polygon2D poly;
  for (const Point2& p : subject_quad) poly.push(p);

  for (int e = 0; e < 4 && poly.n >= 3; ++e) {
    const Point2 a = clip_quad[e];
    const Point2 b = clip_quad[(e + 1) % 4];
    Polygon2D next;
    for (std::size_t i = 0; i < poly.n; ++i) {
      const Point2 prev = poly.v[(i + poly.n - 1) % poly.n];
      const Point2 cur = poly.v[i];
      const double sp = edge_side(a, b, prev);
      const double sc = edge_side(a, b, cur);
      if (sc >= 0.0) {
        if (sp < 0.0) next.push(intersect(prev, cur, sp, sc));
        next.push(cur);
      } else if (sp > 0.0) {
        next.push(intersect(prev, cur, sp, sc));
      }
      // sp == 0 with cur outside: the crossing point is prev itself and was
      // already emitted when prev was the current vertex.
    }
    poly = next;
  }
  if (poly.n < 3) poly.n = 0;
  return poly;
}

double bev_iou_axis_aligned(const BevBox& a, const BevBox& b) {
  validate(a);
  validate(b);
  const BevBox aa = axis_align(a);
  const BevBox ab = axis_align(b);
  const kernels::Aabb2 box{aa.cx - aa.l / 2.0, aa.cy - aa.w / 2.0,
                           aa.cx + aa.l / 2.0, aa.cy + aa.w / 2.0};
  const kernels::Aabb2 query{ab.cx - ab.l / 2.0, ab.cy - ab.w / 2.0,
                             ab.cx + ab.l / 2.0, ab.cy + ab.w / 2.0};
  double out = 0.0;
  kernels::ops().aa_iou_against(&box, 1, query, &out);
  return out;
}

double bev_iou_rotated(const BevBox& a, const BevBox& b) {
  validate(a);
  validate(b);
  const double inter = clipped_area(a, b);
  if (!(inter > 0.0)) return 0.0;
  const double uni = a.w * a.l + b.w * b.l - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d_rotated(const Box3D& a, const Box3D& b) {
  validate(a);
  validate(b);
  const ZInterval za = z_interval(a);
  const ZInterval zb = z_interval(b);
  const double dz =
      std::max(std::min(za.hi, zb.hi) - std::max(za.lo, zb.lo), 0.0);
  if (!(dz > 0.0)) return 0.0;
  const double inter = clipped_area(to_bev(a), to_bev(b)) * dz;
  if (!(inter > 0.0)) return 0.0;
  const double uni = a.w * a.l * a.h + b.w * b.l * b.h - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double diou_3d(const Box3D& pred, const Box3D& gt) {
  const double iou = iou_3d_rotated(pred, gt);
  const double dx = pred.cx - gt.cx;
  const double dy = pred.cy - gt.cy;
  const double dz = pred.cz - gt.cz;
  const double rho2 = dx * dx + dy * dy + dz * dz;
  const Aabb3 hull = merge(corner_aabb(pred), corner_aabb(gt));
  const double ex = hull.hi[0] - hull.lo[0];
  const double ey = hull.hi[1] - hull.lo[1];
  const double ez = hull.hi[2] - hull.lo[2];
  const double c2 = ex * ex + ey * ey + ez * ez;
  return 1.0 - iou + rho2 / c2;
}

McEstimate mc_iou_oracle(const Box3D& a, const Box3D& b,
                         std::uint64_t n_samples, std::uint64_t seed) {
  validate(a);
  validate(b);
  const Aabb3 region = merge(corner_aabb(a), corner_aabb(b));
  const kernels::BoxFrame fa =
      kernels::make_frame(a.cx, a.cy, a.cz, a.w, a.l, a.h, a.yaw);
  const kernels::BoxFrame fb =
      kernels::make_frame(b.cx, b.cy, b.cz, b.w, b.l, b.h, b.yaw);

  constexpr std::size_t kBatch = 4096;
  std::vector<double> xs(kBatch), ys(kBatch), zs(kBatch);
  Rng rng(seed);

  McEstimate est;
  std::uint64_t remaining = n_samples;
  while (remaining > 0) {
    const std::size_t batch =
        static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kBatch));
    for (std::size_t i = 0; i < batch; ++i) {
      xs[i] = rng.uniform(region.lo[0], region.hi[0]);
      ys[i] = rng.uniform(region.lo[1], region.hi[1]);
      zs[i] = rng.uniform(region.lo[2], region.hi[2]);
    }
    const kernels::PairCounts counts = kernels::ops().count_points_in_pair(
        xs.data(), ys.data(), zs.data(), batch, fa, fb);
    est.n_union += counts.in_union;
    est.n_inter += counts.in_inter;
    remaining -= batch;
  }

  if (est.n_union > 0) {
    est.iou = static_cast<double>(est.n_inter) / static_cast<double>(est.n_union);
    est.std_err = std::sqrt(est.iou * (1.0 - est.iou) /
                            static_cast<double>(est.n_union));
  } else {
    est.iou = 0.0;
    est.std_err = 1.0;
  }
  return est;
}

}  // namespace detkit
