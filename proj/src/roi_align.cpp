#include "detkit/roi_align.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace detkit {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'F', 'G'};
constexpr std::uint32_t kVersion = 1;

// Bilinear read in continuous cell coordinates, where integer coordinates
// sit on cell centers; out-of-bounds neighbors contribute zero.
double sample_bilinear(const FeatureGrid& grid, double gx, double gy,
                       std::int64_t c) {
  const std::int64_t x0 = static_cast<std::int64_t>(std::floor(gx));
  const std::int64_t y0 = static_cast<std::int64_t>(std::floor(gy));
  const double fx = gx - static_cast<double>(x0);
  const double fy = gy - static_cast<double>(y0);

  auto value_at = [&](std::int64_t ix, std::int64_t iy) -> double {
    if (ix < 0 || ix >= grid.size_x || iy < 0 || iy >= grid.size_y) return 0.0;
    return grid.at(ix, iy, c);
  };

  return value_at(x0, y0) * (1.0 - fx) * (1.0 - fy) +
         value_at(x0 + 1, y0) * fx * (1.0 - fy) +
         value_at(x0, y0 + 1) * (1.0 - fx) * fy +
         value_at(x0 + 1, y0 + 1) * fx * fy;
}

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("feature grid file: truncated");
  return value;
}

}  // namespace

void validate(const FeatureGrid& grid) {
  if (grid.size_x < 1 || grid.size_y < 1 || grid.channels < 1) {
    throw std::domain_error("FeatureGrid: dims must be positive");
  }
  if (!(grid.cell_size > 0.0) || !std::isfinite(grid.cell_size) ||
      !std::isfinite(grid.origin_x) || !std::isfinite(grid.origin_y)) {
    throw std::domain_error("FeatureGrid: bad spatial metadata");
  }
  const std::size_t expected = static_cast<std::size_t>(grid.size_x) *
                               static_cast<std::size_t>(grid.size_y) *
                               static_cast<std::size_t>(grid.channels);
  if (grid.values.size() != expected) {
    throw std::domain_error("FeatureGrid: value buffer length mismatch");
  }
}

RoiPatch rotated_roi_align(const FeatureGrid& grid, const BevBox& box,
                           std::int64_t s) {
  validate(grid);
  detkit::validate(box);
  if (s < 1) throw std::domain_error("rotated_roi_align: resolution must be >= 1");

  RoiPatch patch;
  patch.s = s;
  patch.channels = grid.channels;
  patch.values.resize(static_cast<std::size_t>(s * s * grid.channels));

  const double cos_yaw = std::cos(box.yaw);
  const double sin_yaw = std::sin(box.yaw);
  for (std::int64_t bx = 0; bx < s; ++bx) {
    // Bin center along the heading axis (local x, spanned by l).
    const double u =
        -box.l / 2.0 + (static_cast<double>(bx) + 0.5) * box.l / static_cast<double>(s);
    for (std::int64_t by = 0; by < s; ++by) {
      const double v =
          -box.w / 2.0 + (static_cast<double>(by) + 0.5) * box.w / static_cast<double>(s);
      const double wx = box.cx + cos_yaw * u - sin_yaw * v;
      const double wy = box.cy + sin_yaw * u + cos_yaw * v;
      const double gx = (wx - grid.origin_x) / grid.cell_size - 0.5;
      const double gy = (wy - grid.origin_y) / grid.cell_size - 0.5;
      for (std::int64_t c = 0; c < grid.channels; ++c) {
        patch.values[static_cast<std::size_t>((bx * s + by) * grid.channels + c)] =
            sample_bilinear(grid, gx, gy, c);
      }
    }
  }
  return patch;
}

void save_feature_grid(const std::string& path, const FeatureGrid& grid) {
  validate(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("feature grid file: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kVersion);
  write_raw(out, grid.size_x);
  write_raw(out, grid.size_y);
  write_raw(out, grid.channels);
  write_raw(out, grid.origin_x);
  write_raw(out, grid.origin_y);
  write_raw(out, grid.cell_size);
  for (double v : grid.values) write_raw(out, static_cast<float>(v));
  if (!out) throw std::runtime_error("feature grid file: write failed " + path);
}

FeatureGrid load_feature_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("feature grid file: cannot open " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("feature grid file: bad magic in " + path);
  }
  if (read_raw<std::uint32_t>(in) != kVersion) {
    throw std::runtime_error("feature grid file: unsupported version in " + path);
  }
  FeatureGrid grid;
  grid.size_x = read_raw<std::int64_t>(in);
  grid.size_y = read_raw<std::int64_t>(in);
  grid.channels = read_raw<std::int64_t>(in);
  grid.origin_x = read_raw<double>(in);
  grid.origin_y = read_raw<double>(in);
  grid.cell_size = read_raw<double>(in);
  if (grid.size_x < 1 || grid.size_y < 1 || grid.channels < 1) {
    throw std::runtime_error("feature grid file: bad dims in " + path);
  }
  const std::size_t count = static_cast<std::size_t>(grid.size_x) *
                            static_cast<std::size_t>(grid.size_y) *
                            static_cast<std::size_t>(grid.channels);
  grid.values.resize(count);
  for (double& v : grid.values) v = static_cast<double>(read_raw<float>(in));
  validate(grid);
  return grid;
}

}  // namespace detkit
