#include "detkit/kitti.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace detkit {

namespace {

std::string read_file(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& data,
                std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

double parse_field(const std::string& token, std::size_t lineno) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != token.size()) {
    throw std::runtime_error("label line " + std::to_string(lineno) +
                             ": bad numeric field '" + token + "'");
  }
  return value;
}

// Difficulty thresholds: minimum image-box pixel height, maximum occlusion
// level, maximum truncation, per level Easy/Moderate/Hard.
struct DifficultyRule {
  double min_height;
  int max_occlusion;
  double max_truncation;
};
constexpr DifficultyRule kDifficultyRules[3] = {
    {40.0, 0, 0.15}, {25.0, 1, 0.30}, {25.0, 2, 0.50}};

std::array<double, 3> mat3_apply_t(const std::array<double, 9>& m,
                                   const std::array<double, 3>& p) {
  // Transpose application: rotation inverse.
  return {m[0] * p[0] + m[3] * p[1] + m[6] * p[2],
          m[1] * p[0] + m[4] * p[1] + m[7] * p[2],
          m[2] * p[0] + m[5] * p[1] + m[8] * p[2]};
}

std::map<std::string, std::string> stems_of(const std::string& dir,
                                            const std::string& ext) {
  std::map<std::string, std::string> out;
  if (dir.empty()) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path p = entry.path();
    if (p.extension() == ext) out[p.stem().string()] = p.string();
  }
  return out;
}

}  // namespace

KittiLabel parse_label_line(const std::string& line, std::size_t lineno) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  if (tokens.size() != 15 && tokens.size() != 16) {
    throw std::runtime_error("label line " + std::to_string(lineno) + ": got " +
                             std::to_string(tokens.size()) +
                             " fields, expected 15 (labels) or 16 (detections)");
  }
  KittiLabel label;
  label.category = tokens[0];
  label.truncation = parse_field(tokens[1], lineno);
  label.occlusion = static_cast<int>(parse_field(tokens[2], lineno));
  label.alpha = parse_field(tokens[3], lineno);
  label.left = parse_field(tokens[4], lineno);
  label.top = parse_field(tokens[5], lineno);
  label.right = parse_field(tokens[6], lineno);
  label.bottom = parse_field(tokens[7], lineno);
  label.height = parse_field(tokens[8], lineno);
  label.width = parse_field(tokens[9], lineno);
  label.length = parse_field(tokens[10], lineno);
  label.x = parse_field(tokens[11], lineno);
  label.y = parse_field(tokens[12], lineno);
  label.z = parse_field(tokens[13], lineno);
  label.rotation_y = parse_field(tokens[14], lineno);
  if (tokens.size() == 16) label.score = parse_field(tokens[15], lineno);
  return label;
}

std::vector<KittiLabel> parse_label_file(const std::string& text) {
  std::vector<KittiLabel> labels;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    labels.push_back(parse_label_line(line, lineno));
  }
  return labels;
}

std::string format_label(const KittiLabel& label) {
  std::ostringstream out;
  out.precision(10);
  out << label.category << ' ' << label.truncation << ' ' << label.occlusion
      << ' ' << label.alpha << ' ' << label.left << ' ' << label.top << ' '
      << label.right << ' ' << label.bottom << ' ' << label.height << ' '
      << label.width << ' ' << label.length << ' ' << label.x << ' ' << label.y
      << ' ' << label.z << ' ' << label.rotation_y;
  if (label.score.has_value()) out << ' ' << *label.score;
  return out.str();
}

std::vector<KittiLabel> load_label_file(const std::string& path) {
  try {
    return parse_label_file(read_file(path, std::ios::in));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_label_file(const std::string& path,
                     const std::vector<KittiLabel>& labels) {
  std::string text;
  for (const KittiLabel& label : labels) {
    text += format_label(label);
    text += '\n';
  }
  write_file(path, text, std::ios::out);
}

std::vector<PointXYZI> parse_pointcloud_bin(const std::string& bytes) {
  if (bytes.size() % 16 != 0) {
    throw std::runtime_error("point cloud: byte length " +
                             std::to_string(bytes.size()) +
                             " is not a multiple of 16");
  }
  std::vector<PointXYZI> points(bytes.size() / 16);
  if (!points.empty()) {
    std::memcpy(points.data(), bytes.data(), bytes.size());
  }
  return points;
}

std::string format_pointcloud_bin(const std::vector<PointXYZI>& points) {
  std::string bytes(points.size() * 16, '\0');
  if (!points.empty()) {
    std::memcpy(bytes.data(), points.data(), bytes.size());
  }
  return bytes;
}

std::vector<PointXYZI> load_pointcloud(const std::string& path) {
  try {
    return parse_pointcloud_bin(read_file(path, std::ios::binary));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_pointcloud(const std::string& path,
                     const std::vector<PointXYZI>& points) {
  write_file(path, format_pointcloud_bin(points), std::ios::binary);
}

const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kModerate: return "moderate";
    case Difficulty::kHard: return "hard";
    case Difficulty::kIgnored: return "ignored";
  }
  return "unknown";
}

Difficulty difficulty_of(const KittiLabel& label) {
  const double box_height = label.bottom - label.top;
  for (int level = 0; level < 3; ++level) {
    const DifficultyRule& rule = kDifficultyRules[level];
    if (box_height >= rule.min_height && label.occlusion <= rule.max_occlusion &&
        label.truncation <= rule.max_truncation) {
      return static_cast<Difficulty>(level);
    }
  }
  return Difficulty::kIgnored;
}

Calibration parse_calib_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Calibration calib;
  bool have_r0 = false, have_tr = false;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::istringstream values(line.substr(colon + 1));
    if (key == "R0_rect" || key == "R_rect") {
      for (double& v : calib.r0_rect) {
        if (!(values >> v)) throw std::runtime_error("calib: R0_rect needs 9 values");
      }
      have_r0 = true;
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      for (double& v : calib.tr_velo_to_cam) {
        if (!(values >> v)) {
          throw std::runtime_error("calib: Tr_velo_to_cam needs 12 values");
        }
      }
      have_tr = true;
    }
  }
  if (!have_r0 || !have_tr) {
    throw std::runtime_error("calib: missing R0_rect or Tr_velo_to_cam");
  }
  return calib;
}

Calibration load_calib_file(const std::string& path) {
  try {
    return parse_calib_file(read_file(path, std::ios::in));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Box3D label_to_lidar_box(const KittiLabel& label, const Calibration* calib) {
  Box3D box;
  box.w = label.width;
  box.l = label.length;
  box.h = label.height;
  if (calib == nullptr) {
    box.cx = label.x;
    box.cy = label.y;
    box.cz = label.z;
    box.yaw = label.rotation_y;
    return box;
  }
  // Rect camera -> reference camera -> LiDAR; the label location is the
  // bottom-face center, lifted by h/2 once in the LiDAR frame (z up).
  const std::array<double, 3> p_rect{label.x, label.y, label.z};
  const std::array<double, 3> p_ref = mat3_apply_t(calib->r0_rect, p_rect);
  const auto& tr = calib->tr_velo_to_cam;
  const std::array<double, 3> shifted{p_ref[0] - tr[3], p_ref[1] - tr[7],
                                      p_ref[2] - tr[11]};
  const std::array<double, 9> rot{tr[0], tr[1], tr[2], tr[4], tr[5],
                                  tr[6], tr[8], tr[9], tr[10]};
  const std::array<double, 3> p_velo = mat3_apply_t(rot, shifted);
  box.cx = p_velo[0];
  box.cy = p_velo[1];
  box.cz = p_velo[2] + label.height / 2.0;
  box.yaw = -label.rotation_y - std::numbers::pi / 2.0;
  return box;
}

std::vector<DetectionFrame> load_dataset(const std::string& gts_dir,
                                         const std::string& dets_dir,
                                         const std::string& clouds_dir,
                                         const std::string& calib_dir) {
  const auto gt_files = stems_of(gts_dir, ".txt");
  const auto det_files = stems_of(dets_dir, ".txt");
  const auto cloud_files = stems_of(clouds_dir, ".bin");
  const auto calib_files = stems_of(calib_dir, ".txt");

  for (const auto& [stem, path] : det_files) {
    if (!gt_files.count(stem)) {
      throw std::runtime_error("detections for frame '" + stem +
                               "' have no matching label file");
    }
  }

  std::vector<DetectionFrame> frames;
  frames.reserve(gt_files.size());
  for (const auto& [stem, label_path] : gt_files) {
    DetectionFrame frame;
    frame.id = stem;

    Calibration calib;
    const Calibration* calib_ptr = nullptr;
    if (auto it = calib_files.find(stem); it != calib_files.end()) {
      calib = load_calib_file(it->second);
      calib_ptr = &calib;
    }

    for (const KittiLabel& label : load_label_file(label_path)) {
      frame.gts.push_back({label, label_to_lidar_box(label, calib_ptr)});
    }
    if (auto it = det_files.find(stem); it != det_files.end()) {
      for (const KittiLabel& label : load_label_file(it->second)) {
        if (!label.score.has_value()) {
          throw std::runtime_error(it->second +
                                   ": detection lines need a 16th score field");
        }
        frame.dets.push_back(
            {label_to_lidar_box(label, calib_ptr), *label.score, label.category});
      }
    }
    if (auto it = cloud_files.find(stem); it != cloud_files.end()) {
      frame.cloud = load_pointcloud(it->second);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace detkit
