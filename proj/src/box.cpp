#include "detkit/box.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace detkit {

namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

bool is_valid(const Box3D& b) {
  return all_finite({b.cx, b.cy, b.cz, b.w, b.l, b.h, b.yaw}) && b.w > 0.0 &&
         b.l > 0.0 && b.h > 0.0;
}

bool is_valid(const BevBox& b) {
  return all_finite({b.cx, b.cy, b.w, b.l, b.yaw}) && b.w > 0.0 && b.l > 0.0;
}

bool is_valid(const Extent3& e) {
  for (int axis = 0; axis < 3; ++axis) {
    if (!std::isfinite(e.lo[axis]) || !std::isfinite(e.hi[axis])) return false;
    if (!(e.hi[axis] > e.lo[axis])) return false;
  }
  return true;
}

void validate(const Box3D& b) {
  if (!is_valid(b)) throw std::domain_error("Box3D: dimensions must be positive and all fields finite");
}

void validate(const BevBox& b) {
  if (!is_valid(b)) throw std::domain_error("BevBox: dimensions must be positive and all fields finite");
}

void validate(const Extent3& e) {
  if (!is_valid(e)) throw std::domain_error("Extent3: requires finite bounds with hi > lo per axis");
}

std::array<Point2, 4> bev_corners(const BevBox& b) {
  const double hx = b.l / 2.0;  // heading direction, local x
  const double hy = b.w / 2.0;  // lateral, local y
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  // counter-clockwise
  const double lx[4] = {hx, -hx, -hx, hx};
  const double ly[4] = {hy, hy, -hy, -hy};
  std::array<Point2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {b.cx + c * lx[i] - s * ly[i], b.cy + s * lx[i] + c * ly[i]};
  }
  return out;
}

std::array<std::array<double, 3>, 8> box_corners(const Box3D& b) {
  const auto quad = bev_corners(to_bev(b));
  std::array<std::array<double, 3>, 8> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {quad[i].x, quad[i].y, b.cz - b.h / 2.0};
    out[i + 4] = {quad[i].x, quad[i].y, b.cz + b.h / 2.0};
  }
  return out;
}

double polygon_area(const Polygon2D& poly) {
  if (poly.n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = poly.n - 1; i < poly.n; j = i++) {
    twice += poly.v[j].x * poly.v[i].y - poly.v[i].x * poly.v[j].y;
  }
  return twice / 2.0;
}

BevBox to_bev(const Box3D& b) { return {b.cx, b.cy, b.w, b.l, b.yaw}; }

BevBox axis_align(const BevBox& b) {
  const double quarter = std::numbers::pi / 2.0;
  const double q = b.yaw / quarter;
  // round half down: the tie at pi/4 + k*pi/2 snaps to the lower multiple
  const long long k = static_cast<long long>(std::ceil(q - 0.5));
  BevBox out{b.cx, b.cy, b.w, b.l, 0.0};
  if (k % 2 != 0) {
    out.w = b.l;
    out.l = b.w;
  }
  return out;
}

}  // namespace detkit
