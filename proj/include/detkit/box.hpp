#pragma once

#include <array>
#include <cstddef>

namespace detkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Oriented 3D box. (cx,cy,cz) is the volume center; w spans the box's local
// y axis (lateral), l spans local x (heading direction), h spans z. yaw is
// the heading angle around the up axis, stored unnormalized; all geometric
// operations are invariant to adding 2*pi.
struct Box3D {
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double w = 0.0, l = 0.0, h = 0.0;
  double yaw = 0.0;
};

// Top-down footprint of a Box3D: z and height dropped.
struct BevBox {
  double cx = 0.0, cy = 0.0;
  double w = 0.0, l = 0.0;
  double yaw = 0.0;
};

// Convex polygon with a small fixed capacity. Clipping a quad against four
// half-planes yields at most 8 vertices; 16 leaves headroom.
struct Polygon2D {
  static constexpr std::size_t kCapacity = 16;
  std::array<Point2, kCapacity> v{};
  std::size_t n = 0;

  void push(Point2 p) { v[n++] = p; }
};

// Axis-aligned extent of the scene, [lo, hi) per axis.
struct Extent3 {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{0.0, 0.0, 0.0};

  double span(int axis) const { return hi[axis] - lo[axis]; }
  std::array<double, 3> center() const {
    return {(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0};
  }
};

bool is_valid(const Box3D& b);
bool is_valid(const BevBox& b);
bool is_valid(const Extent3& e);

// Throw std::domain_error when the invariants above are violated.
void validate(const Box3D& b);
void validate(const BevBox& b);
void validate(const Extent3& e);

// Footprint corners in counter-clockwise order.
std::array<Point2, 4> bev_corners(const BevBox& b);
// All 8 corners of the oriented volume.
std::array<std::array<double, 3>, 8> box_corners(const Box3D& b);

// Signed shoelace area; counter-clockwise polygons are positive.
double polygon_area(const Polygon2D& poly);

BevBox to_bev(const Box3D& b);

// Snap yaw to the nearest multiple of pi/2 and return the equivalent yaw-0
// box; odd multiples swap w and l. A tie at exactly pi/4 + k*pi/2 breaks
// toward the lower multiple.
BevBox axis_align(const BevBox& b);

}  // namespace detkit
