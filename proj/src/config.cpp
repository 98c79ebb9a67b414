#include "detkit/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace detkit {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::istringstream in(value);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(trim(part));
  return parts;
}

double to_double(const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed == value.size()) return parsed;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(value);
}

std::uint64_t to_u64(const std::string& value) {
  try {
    std::size_t consumed = 0;
    const unsigned long long parsed = std::stoull(value, &consumed);
    if (consumed == value.size()) return parsed;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(value);
}

std::array<double, 3> to_triple(const std::string& value) {
  const std::vector<std::string> parts = split_commas(value);
  if (parts.size() != 3) throw std::invalid_argument(value);
  return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

}  // namespace

void apply_config_entry(const std::string& key, const std::string& value,
                        RunConfig& config) {
  if (key == "extent_min") {
    config.extent.lo = to_triple(value);
  } else if (key == "extent_max") {
    config.extent.hi = to_triple(value);
  } else if (key == "voxel_size") {
    config.voxel_size = to_triple(value);
  } else if (key == "max_points_per_voxel") {
    config.max_points_per_voxel = static_cast<std::size_t>(to_u64(value));
  } else if (key == "num_proposals") {
    config.num_proposals = static_cast<std::size_t>(to_u64(value));
  } else if (key == "roi_resolution") {
    config.roi_resolution = static_cast<std::int64_t>(to_u64(value));
  } else if (key == "lambda_cls") {
    config.weights.cls = to_double(value);
  } else if (key == "lambda_l1") {
    config.weights.l1 = to_double(value);
  } else if (key == "lambda_iou") {
    config.weights.iou = to_double(value);
  } else if (key == "category") {
    config.category = value;
  } else if (key == "iou_thresholds") {
    config.iou_thresholds.clear();
    for (const std::string& part : split_commas(value)) {
      config.iou_thresholds.push_back(to_double(part));
    }
  } else if (key == "noise_levels") {
    config.noise_levels.clear();
    for (const std::string& part : split_commas(value)) {
      config.noise_levels.push_back(to_u64(part));
    }
  } else if (key == "noise_margin") {
    config.noise_margin = to_double(value);
  } else if (key == "seed") {
    config.seed = to_u64(value);
  } else {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
}

void apply_config_text(const std::string& text, RunConfig& config) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(key, value, config);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": bad value '" + std::string(e.what()) +
                               "' for key '" + key + "'");
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
}

void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), config);
}

}  // namespace detkit
