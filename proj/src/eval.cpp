#include "detkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "detkit/iou.hpp"
#include "detkit/rng.hpp"

namespace detkit {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct PooledDet {
  std::size_t frame = 0;
  std::size_t det = 0;
  double score = 0.0;
};

double overlap(const Box3D& a, const Box3D& b, OverlapMetric metric) {
  return metric == OverlapMetric::k3D ? iou_3d_rotated(a, b)
                                      : bev_iou_rotated(to_bev(a), to_bev(b));
}

std::string format_ap(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << value;
  return out.str();
}

}  // namespace

const char* metric_name(OverlapMetric m) {
  return m == OverlapMetric::k3D ? "3d" : "bev";
}

ApResult ap_11(const std::vector<DetectionFrame>& frames,
               const std::string& category, double iou_threshold,
               Difficulty difficulty, OverlapMetric metric) {
  if (!(iou_threshold > 0.0) || iou_threshold > 1.0) {
    throw std::domain_error("ap_11: threshold must lie in (0, 1]");
  }
  ApResult result;

  // Per frame: indices of category gts, and whether each is counted at this
  // difficulty or, being harder/ignored, merely absorbs detections.
  std::vector<std::vector<std::size_t>> gt_of_frame(frames.size());
  std::vector<std::vector<char>> counted_of_frame(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t g = 0; g < frames[f].gts.size(); ++g) {
      const GtEntry& gt = frames[f].gts[g];
      if (gt.label.category != category) continue;
      const Difficulty bucket = difficulty_of(gt.label);
      const bool counted = bucket != Difficulty::kIgnored &&
                           static_cast<int>(bucket) <= static_cast<int>(difficulty);
      gt_of_frame[f].push_back(g);
      counted_of_frame[f].push_back(counted ? 1 : 0);
      if (counted) ++result.n_gts;
    }
  }
  if (result.n_gts == 0) {
    result.no_gt_warning = true;
    return result;
  }

  std::vector<PooledDet> pooled;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t d = 0; d < frames[f].dets.size(); ++d) {
      if (frames[f].dets[d].category != category) continue;
      pooled.push_back({f, d, frames[f].dets[d].score});
    }
  }
  // Equal scores fall back to frame id then detection order, keeping the
  // ranking independent of frame-list order.
  std::sort(pooled.begin(), pooled.end(),
            [&frames](const PooledDet& a, const PooledDet& b) {
              if (a.score != b.score) return a.score > b.score;
              if (frames[a.frame].id != frames[b.frame].id) {
                return frames[a.frame].id < frames[b.frame].id;
              }
              return a.det < b.det;
            });

  std::vector<std::vector<char>> gt_matched(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    gt_matched[f].assign(gt_of_frame[f].size(), 0);
  }

  std::size_t tp = 0, fp = 0;
  std::vector<std::pair<double, double>> curve;  // (recall, precision)
  curve.reserve(pooled.size());
  for (const PooledDet& det : pooled) {
    const Box3D& det_box = frames[det.frame].dets[det.det].box;
    double best_iou = 0.0;
    std::size_t best = gt_of_frame[det.frame].size();
    for (std::size_t k = 0; k < gt_of_frame[det.frame].size(); ++k) {
      if (gt_matched[det.frame][k]) continue;
      const std::size_t g = gt_of_frame[det.frame][k];
      const double iou = overlap(det_box, frames[det.frame].gts[g].box, metric);
      if (iou > best_iou) {
        best_iou = iou;
        best = k;
      }
    }
    if (best != gt_of_frame[det.frame].size() && best_iou >= iou_threshold) {
      gt_matched[det.frame][best] = 1;
      if (counted_of_frame[det.frame][best]) {
        ++tp;
      }
      // A harder-than-requested or ignored gt absorbs the detection:
      // neither true nor false positive.
    } else {
      ++fp;
    }
    if (tp + fp > 0) {
      curve.emplace_back(static_cast<double>(tp) / static_cast<double>(result.n_gts),
                         static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
  }
  result.n_tp = tp;
  result.n_fp = fp;

  double sum = 0.0;
  for (int step = 0; step <= 10; ++step) {
    const double r = static_cast<double>(step) / 10.0;
    double best_prec = 0.0;
    for (const auto& [recall, precision] : curve) {
      if (recall >= r) best_prec = std::max(best_prec, precision);
    }
    sum += best_prec;
  }
  result.ap = 100.0 * sum / 11.0;
  return result;
}

double EvalReport::map_of(OverlapMetric metric, double threshold) const {
  double sum = 0.0;
  int count = 0;
  for (const ApRow& row : rows) {
    if (row.metric == metric && row.threshold == threshold) {
      sum += row.result.ap;
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

EvalReport eval_suite(const std::vector<DetectionFrame>& frames,
                      const EvalConfig& config) {
  EvalReport report;
  report.category = config.category;
  for (OverlapMetric metric : {OverlapMetric::k3D, OverlapMetric::kBev}) {
    for (double threshold : config.thresholds) {
      for (Difficulty difficulty :
           {Difficulty::kEasy, Difficulty::kModerate, Difficulty::kHard}) {
        ApRow row;
        row.metric = metric;
        row.threshold = threshold;
        row.difficulty = difficulty;
        row.result = ap_11(frames, config.category, threshold, difficulty, metric);
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

DetectionFrame inject_noise(const DetectionFrame& frame, std::uint64_t k,
                            double margin, std::uint64_t seed) {
  if (margin < 0.0) throw std::domain_error("inject_noise: negative margin");
  DetectionFrame out = frame;
  if (k == 0) return out;
  Rng rng(derive_seed(seed, fnv1a(frame.id)));
  out.cloud.reserve(out.cloud.size() + k * frame.gts.size());
  for (const GtEntry& gt : frame.gts) {
    const Box3D& box = gt.box;
    const double cos_yaw = std::cos(box.yaw);
    const double sin_yaw = std::sin(box.yaw);
    const double hu = box.l / 2.0 + margin;
    const double hv = box.w / 2.0 + margin;
    const double hz = box.h / 2.0 + margin;
    for (std::uint64_t i = 0; i < k; ++i) {
      const double u = rng.uniform(-hu, hu);
      const double v = rng.uniform(-hv, hv);
      const double dz = rng.uniform(-hz, hz);
      const double intensity = rng.next_double();
      PointXYZI p;
      p.x = static_cast<float>(box.cx + cos_yaw * u - sin_yaw * v);
      p.y = static_cast<float>(box.cy + sin_yaw * u + cos_yaw * v);
      p.z = static_cast<float>(box.cz + dz);
      p.intensity = static_cast<float>(intensity);
      out.cloud.push_back(p);
    }
  }
  return out;
}

std::vector<NoiseRow> noise_sweep(const std::vector<DetectionFrame>& frames,
                                  const VoxelGridSpec& grid_spec,
                                  std::size_t points_per_voxel,
                                  const EvalConfig& config) {
  std::vector<NoiseRow> rows;
  rows.reserve(config.noise_levels.size());
  for (std::uint64_t k : config.noise_levels) {
    NoiseRow row;
    row.k = k;
    std::vector<DetectionFrame> noisy;
    noisy.reserve(frames.size());
    for (const DetectionFrame& frame : frames) {
      row.points_before += frame.cloud.size();
      noisy.push_back(inject_noise(frame, k, config.noise_margin, config.seed));
      row.points_after += noisy.back().cloud.size();
      const VoxelMap vmap = assign_points(noisy.back().cloud, grid_spec,
                                          points_per_voxel, config.seed);
      row.nonempty_voxels += vmap.voxels.size();
      row.retained_points += vmap.n_retained;
    }
    row.points_added = row.points_after - row.points_before;
    row.report = eval_suite(noisy, config);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_records(const EvalReport& report) {
  std::ostringstream out;
  for (const ApRow& row : report.rows) {
    out << "ap metric=" << metric_name(row.metric) << " threshold="
        << format_ap(row.threshold) << " difficulty="
        << difficulty_name(row.difficulty) << " ap=" << format_ap(row.result.ap)
        << " n_gts=" << row.result.n_gts << " tp=" << row.result.n_tp
        << " fp=" << row.result.n_fp
        << (row.result.no_gt_warning ? " warning=no_gt" : "") << '\n';
  }
  for (OverlapMetric metric : {OverlapMetric::k3D, OverlapMetric::kBev}) {
    std::vector<double> thresholds;
    for (const ApRow& row : report.rows) {
      if (row.metric == metric &&
          std::find(thresholds.begin(), thresholds.end(), row.threshold) ==
              thresholds.end()) {
        thresholds.push_back(row.threshold);
      }
    }
    for (double threshold : thresholds) {
      out << "map metric=" << metric_name(metric) << " threshold="
          << format_ap(threshold) << " map="
          << format_ap(report.map_of(metric, threshold)) << '\n';
    }
  }
  return out.str();
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "category: " << report.category << '\n';
  out << std::left << std::setw(8) << "metric" << std::setw(7) << "thr"
      << std::setw(11) << "easy" << std::setw(11) << "moderate" << std::setw(11)
      << "hard" << std::setw(11) << "mAP" << '\n';
  for (OverlapMetric metric : {OverlapMetric::k3D, OverlapMetric::kBev}) {
    std::vector<double> thresholds;
    for (const ApRow& row : report.rows) {
      if (row.metric == metric &&
          std::find(thresholds.begin(), thresholds.end(), row.threshold) ==
              thresholds.end()) {
        thresholds.push_back(row.threshold);
      }
    }
    for (double threshold : thresholds) {
      out << std::left << std::setw(8) << metric_name(metric);
      {
        std::ostringstream thr;
        thr << std::fixed << std::setprecision(2) << threshold;
        out << std::setw(7) << thr.str();
      }
      for (Difficulty difficulty :
           {Difficulty::kEasy, Difficulty::kModerate, Difficulty::kHard}) {
        double value = 0.0;
        for (const ApRow& row : report.rows) {
          if (row.metric == metric && row.threshold == threshold &&
              row.difficulty == difficulty) {
            value = row.result.ap;
          }
        }
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(4) << value;
        out << std::setw(11) << cell.str();
      }
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << report.map_of(metric, threshold);
      out << std::setw(11) << cell.str() << '\n';
    }
  }
  return out.str();
}

std::string noise_records(const std::vector<NoiseRow>& rows) {
  std::ostringstream out;
  for (const NoiseRow& row : rows) {
    out << "noise k=" << row.k << " points_before=" << row.points_before
        << " points_after=" << row.points_after
        << " points_added=" << row.points_added
        << " nonempty_voxels=" << row.nonempty_voxels
        << " retained_points=" << row.retained_points << '\n';
    std::istringstream records(report_records(row.report));
    std::string line;
    while (std::getline(records, line)) {
      out << "noise k=" << row.k << ' ' << line << '\n';
    }
  }
  return out.str();
}

}  // namespace detkit
