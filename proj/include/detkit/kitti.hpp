#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detkit/box.hpp"
#include "detkit/voxel.hpp"

namespace detkit {

// One line of a KITTI-style label file: 15 whitespace-separated fields, plus
// an optional 16th score field on detection files.
struct KittiLabel {
  std::string category;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  double left = 0.0, top = 0.0, right = 0.0, bottom = 0.0;  // image bbox, px
  double height = 0.0, width = 0.0, length = 0.0;           // meters
  double x = 0.0, y = 0.0, z = 0.0;  // camera rect frame, meters
  double rotation_y = 0.0;           // radians
  std::optional<double> score;
};

// Parse one label line; `lineno` is 1-based and used in error messages.
// Throws std::runtime_error on wrong arity or unparsable numbers.
KittiLabel parse_label_line(const std::string& line, std::size_t lineno);
std::vector<KittiLabel> parse_label_file(const std::string& text);
std::string format_label(const KittiLabel& label);

std::vector<KittiLabel> load_label_file(const std::string& path);
void save_label_file(const std::string& path,
                     const std::vector<KittiLabel>& labels);

// Point-cloud binary codec: four little-endian f32 per point (x, y, z,
// intensity). Throws std::runtime_error when the byte length is not a
// multiple of 16.
std::vector<PointXYZI> parse_pointcloud_bin(const std::string& bytes);
std::string format_pointcloud_bin(const std::vector<PointXYZI>& points);
std::vector<PointXYZI> load_pointcloud(const std::string& path);
void save_pointcloud(const std::string& path,
                     const std::vector<PointXYZI>& points);

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2, kIgnored = 3 };

const char* difficulty_name(Difficulty d);

// Benchmark bucketing: the easiest level whose image-bbox height, occlusion
// and truncation thresholds the label meets, else Ignored.
Difficulty difficulty_of(const KittiLabel& label);

// Rectified-camera-to-LiDAR calibration: R0_rect (3x3 row-major) and
// Tr_velo_to_cam (3x4 row-major).
struct Calibration {
  std::array<double, 9> r0_rect{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 12> tr_velo_to_cam{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
};

// Reads "KEY: v0 v1 ..." lines; requires R0_rect and Tr_velo_to_cam.
Calibration parse_calib_file(const std::string& text);
Calibration load_calib_file(const std::string& path);

// With a calibration, the label's camera-frame bottom-center location is
// mapped into the LiDAR frame, lifted by height/2 to the volume center, and
// the yaw becomes -rotation_y - pi/2. Without one (synthetic fixtures), the
// location is taken directly as the LiDAR-frame volume center and
// rotation_y as the yaw.
Box3D label_to_lidar_box(const KittiLabel& label, const Calibration* calib);

struct DetectionResult {
  Box3D box;
  double score = 0.0;
  std::string category;
};

struct GtEntry {
  KittiLabel label;
  Box3D box;
};

struct DetectionFrame {
  std::string id;
  std::vector<GtEntry> gts;
  std::vector<DetectionResult> dets;
  std::vector<PointXYZI> cloud;
};

// Loads matching per-frame files from directories of "<id>.txt" labels,
// "<id>.txt" detections, and optional "<id>.bin" clouds / "<id>.txt" calibs.
// Every detection-file id must exist in the label dir. Frames are ordered by
// id.
std::vector<DetectionFrame> load_dataset(const std::string& gts_dir,
                                         const std::string& dets_dir,
                                         const std::string& clouds_dir = "",
                                         const std::string& calib_dir = "");

}  // namespace detkit
