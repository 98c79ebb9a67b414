#include "detkit/box_codec.hpp"

#include <cmath>
#include <stdexcept>

namespace detkit {

double proposal_diagonal(const Box3D& proposal) {
  return std::sqrt(proposal.w * proposal.w + proposal.l * proposal.l);
}

Residual7 encode_box(const Box3D& gt, const Box3D& proposal) {
  validate(gt);
  validate(proposal);
  const double d = proposal_diagonal(proposal);
  Residual7 r;
  r.dx = (gt.cx - proposal.cx) / d;
  r.dy = (gt.cy - proposal.cy) / d;
  r.dz = (gt.cz - proposal.cz) / proposal.h;
  r.dw = std::log(gt.w / proposal.w);
  r.dl = std::log(gt.l / proposal.l);
  r.dh = std::log(gt.h / proposal.h);
  r.dyaw = gt.yaw - proposal.yaw;
  return r;
}

Box3D decode_box(const Residual7& r, const Box3D& proposal) {
  validate(proposal);
  const double d = proposal_diagonal(proposal);
  Box3D b;
  b.cx = proposal.cx + r.dx * d;
  b.cy = proposal.cy + r.dy * d;
  b.cz = proposal.cz + r.dz * proposal.h;
  b.w = proposal.w * std::exp(r.dw);
  b.l = proposal.l * std::exp(r.dl);
  b.h = proposal.h * std::exp(r.dh);
  b.yaw = proposal.yaw + r.dyaw;
  return b;
}

std::vector<Box3D> init_proposals(const Extent3& extent, std::size_t n) {
  validate(extent);
  if (n < 1) throw std::domain_error("init_proposals: n must be >= 1");
  const auto c = extent.center();
  Box3D box;
  box.cx = c[0];
  box.cy = c[1];
  box.cz = c[2];
  box.w = extent.span(1);  // w spans the box's local y = world y at yaw 0
  box.l = extent.span(0);
  box.h = extent.span(2);
  box.yaw = 0.0;
  return std::vector<Box3D>(n, box);
}

}  // namespace detkit
