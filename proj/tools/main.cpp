#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "detkit/box_codec.hpp"
#include "detkit/config.hpp"
#include "detkit/eval.hpp"
#include "detkit/iou.hpp"
#include "detkit/kernels.hpp"
#include "detkit/kitti.hpp"
#include "detkit/loss.hpp"
#include "detkit/rng.hpp"
#include "detkit/voxel.hpp"

namespace {

struct ConfigCli {
  std::string config_path;
  std::vector<std::string> overrides;  // "key=value"
};

void add_config_options(CLI::App* cmd, ConfigCli* state) {
  cmd->add_option("--config", state->config_path,
                  "key = value config file (or set DETKIT_CONFIG)");
  cmd->add_option("--set", state->overrides,
                  "override one config key, e.g. --set seed=7")
      ->type_name("KEY=VALUE");
}

detkit::RunConfig resolve_config(const ConfigCli& state) {
  detkit::RunConfig config;
  if (const char* env = std::getenv("DETKIT_CONFIG");
      env != nullptr && state.config_path.empty() && *env != '\0') {
    detkit::apply_config_file(env, config);
  }
  if (!state.config_path.empty()) {
    detkit::apply_config_file(state.config_path, config);
  }
  for (const std::string& entry : state.overrides) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--set expects key=value, got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    try {
      detkit::apply_config_entry(key, entry.substr(eq + 1), config);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("--set " + entry + ": bad value '" + e.what() +
                               "' for key '" + key + "'");
    }
  }
  return config;
}

std::string fixed6(double v) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << v;
  return out.str();
}

int cmd_voxelize(const ConfigCli& cli, const std::string& cloud_path) {
  const detkit::RunConfig config = resolve_config(cli);
  const std::vector<detkit::PointXYZI> points = detkit::load_pointcloud(cloud_path);
  const detkit::VoxelGridSpec spec = config.grid_spec();
  const auto dims = detkit::grid_dims(spec);
  const detkit::VoxelMap vmap = detkit::assign_points(
      points, spec, config.max_points_per_voxel, config.seed);
  std::cout << "grid_dims " << dims[0] << ' ' << dims[1] << ' ' << dims[2] << '\n'
            << "input_points " << vmap.n_input << '\n'
            << "nonempty_voxels " << vmap.voxels.size() << '\n'
            << "retained_points " << vmap.n_retained << '\n'
            << "capped_away " << vmap.n_capped_away << '\n'
            << "out_of_range " << vmap.n_out_of_range << '\n'
            << "seed " << config.seed << '\n'
            << "kernels " << detkit::kernels::ops().name << '\n';
  return 0;
}

// Categories indexed by sorted unique name over both files; a prediction's
// probability vector is its score at its own category, zero elsewhere.
int cmd_match(const ConfigCli& cli, const std::string& preds_path,
              const std::string& labels_path) {
  const detkit::RunConfig config = resolve_config(cli);
  const auto pred_labels = detkit::load_label_file(preds_path);
  const auto gt_labels = detkit::load_label_file(labels_path);

  std::set<std::string> names;
  for (const auto& l : pred_labels) names.insert(l.category);
  for (const auto& l : gt_labels) names.insert(l.category);
  std::map<std::string, int> category_index;
  std::vector<std::string> categories;
  for (const std::string& name : names) {
    category_index[name] = static_cast<int>(categories.size());
    categories.push_back(name);
  }

  std::vector<detkit::Prediction> preds;
  for (const auto& l : pred_labels) {
    if (!l.score.has_value()) {
      throw std::runtime_error(preds_path + ": prediction lines need a score field");
    }
    detkit::Prediction p;
    p.box = detkit::label_to_lidar_box(l, nullptr);
    p.class_probs.assign(categories.size(), 0.0);
    p.class_probs[static_cast<std::size_t>(category_index[l.category])] = *l.score;
    preds.push_back(std::move(p));
  }
  std::vector<detkit::GroundTruth> gts;
  for (const auto& l : gt_labels) {
    gts.push_back({detkit::label_to_lidar_box(l, nullptr), category_index[l.category]});
  }

  const detkit::MatchContext ctx = config.match_context();
  const detkit::MatchResult result = detkit::match(preds, gts, ctx);

  std::cout << "categories";
  for (const std::string& name : categories) std::cout << ' ' << name;
  std::cout << '\n' << "pairs " << result.pairs.size() << '\n';
  for (const auto& [gt_idx, pred_idx] : result.pairs) {
    const detkit::LossBreakdown pair = detkit::matched_pair_loss(
        preds[static_cast<std::size_t>(pred_idx)],
        gts[static_cast<std::size_t>(gt_idx)], ctx);
    std::cout << "pair gt=" << gt_idx << " pred=" << pred_idx
              << " cls=" << fixed6(pair.cls) << " l1=" << fixed6(pair.l1)
              << " diou=" << fixed6(pair.diou) << " total=" << fixed6(pair.total)
              << '\n';
  }
  double background = 0.0;
  for (int pred_idx : result.unmatched_preds) {
    background +=
        detkit::background_loss(preds[static_cast<std::size_t>(pred_idx)]);
  }
  std::cout << "unmatched " << result.unmatched_preds.size()
            << " background_cls=" << fixed6(background) << '\n';
  const detkit::LossBreakdown frame =
      detkit::frame_loss({preds}, gts, ctx);
  std::cout << "frame_loss cls=" << fixed6(frame.cls) << " l1=" << fixed6(frame.l1)
            << " diou=" << fixed6(frame.diou) << " total=" << fixed6(frame.total)
            << '\n'
            << "match_cost " << fixed6(result.total_cost) << '\n';
  return 0;
}

int cmd_eval(const ConfigCli& cli, const std::string& gts_dir,
             const std::string& dets_dir, const std::string& clouds_dir,
             const std::string& calib_dir, bool run_noise) {
  const detkit::RunConfig config = resolve_config(cli);
  const std::vector<detkit::DetectionFrame> frames =
      detkit::load_dataset(gts_dir, dets_dir, clouds_dir, calib_dir);
  std::cout << "frames " << frames.size() << '\n';
  const detkit::EvalReport report = detkit::eval_suite(frames, config.eval_config());
  std::cout << detkit::report_table(report) << detkit::report_records(report);
  if (run_noise) {
    const std::vector<detkit::NoiseRow> rows = detkit::noise_sweep(
        frames, config.grid_spec(), config.max_points_per_voxel,
        config.eval_config());
    std::cout << detkit::noise_records(rows);
  }
  return 0;
}

int cmd_iou_bench(const ConfigCli& cli, std::size_t n_pairs, std::size_t reps) {
  const detkit::RunConfig config = resolve_config(cli);
  detkit::Rng rng(config.seed);
  std::vector<detkit::BevBox> as(n_pairs), bs(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto random_box = [&rng]() {
      detkit::BevBox box;
      box.cx = rng.uniform(-10.0, 10.0);
      box.cy = rng.uniform(-10.0, 10.0);
      box.w = rng.uniform(0.5, 4.0);
      box.l = rng.uniform(0.5, 6.0);
      box.yaw = rng.uniform(-3.2, 3.2);
      return box;
    };
    as[i] = random_box();
    bs[i] = random_box();
  }
  double sink = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t rep = 0; rep < reps; ++rep) {
    for (std::size_t i = 0; i < n_pairs; ++i) {
      sink += detkit::bev_iou_rotated(as[i], bs[i]);
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();
  const double evals = static_cast<double>(n_pairs * reps);
  std::cout << "iou_bench pairs=" << n_pairs << " reps=" << reps
            << " evals=" << static_cast<std::uint64_t>(evals)
            << " seconds=" << fixed6(seconds)
            << " rate_per_s=" << fixed6(seconds > 0.0 ? evals / seconds : 0.0)
            << " checksum=" << fixed6(sink)
            << " kernels=" << detkit::kernels::ops().name << '\n';
  return 0;
}

int cmd_noise(const ConfigCli& cli, const std::string& labels_path,
              const std::string& cloud_path, std::uint64_t k,
              const std::string& out_path) {
  const detkit::RunConfig config = resolve_config(cli);
  detkit::DetectionFrame frame;
  frame.id = std::filesystem::path(labels_path).stem().string();
  for (const detkit::KittiLabel& label : detkit::load_label_file(labels_path)) {
    frame.gts.push_back({label, detkit::label_to_lidar_box(label, nullptr)});
  }
  if (!cloud_path.empty()) frame.cloud = detkit::load_pointcloud(cloud_path);
  const detkit::DetectionFrame noisy =
      detkit::inject_noise(frame, k, config.noise_margin, config.seed);
  std::cout << "frame " << frame.id << '\n'
            << "gts " << frame.gts.size() << '\n'
            << "points_before " << frame.cloud.size() << '\n'
            << "points_after " << noisy.cloud.size() << '\n'
            << "points_added " << noisy.cloud.size() - frame.cloud.size() << '\n'
            << "seed " << config.seed << '\n';
  if (!out_path.empty()) {
    detkit::save_pointcloud(out_path, noisy.cloud);
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic 3D detection toolkit"};
  app.require_subcommand(1);

  ConfigCli vox_cli;
  std::string vox_cloud;
  CLI::App* vox = app.add_subcommand("voxelize", "Bin a point cloud and report voxel statistics");
  vox->add_option("--cloud", vox_cloud, "point cloud .bin")->required();
  add_config_options(vox, &vox_cli);

  ConfigCli match_cli;
  std::string match_preds, match_labels;
  CLI::App* match_cmd = app.add_subcommand("match", "Assign predictions to labels and report losses");
  match_cmd->add_option("--preds", match_preds, "predictions file (label format + score)")->required();
  match_cmd->add_option("--labels", match_labels, "ground-truth label file")->required();
  add_config_options(match_cmd, &match_cli);

  ConfigCli eval_cli;
  std::string eval_gts, eval_dets, eval_clouds, eval_calib;
  bool eval_no_noise = false;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Average-precision suite plus robustness rows");
  eval_cmd->add_option("--gts", eval_gts, "ground-truth label directory")->required();
  eval_cmd->add_option("--dets", eval_dets, "detection directory")->required();
  eval_cmd->add_option("--clouds", eval_clouds, "point-cloud directory");
  eval_cmd->add_option("--calib", eval_calib, "calibration directory");
  eval_cmd->add_flag("--no-noise", eval_no_noise, "skip the noise-robustness sweep");
  add_config_options(eval_cmd, &eval_cli);

  ConfigCli bench_cli;
  std::size_t bench_pairs = 20000;
  std::size_t bench_reps = 25;
  CLI::App* bench_cmd = app.add_subcommand("iou-bench", "Rotated BEV IoU throughput benchmark");
  bench_cmd->add_option("--pairs", bench_pairs, "random box pairs");
  bench_cmd->add_option("--reps", bench_reps, "sweep repetitions");
  add_config_options(bench_cmd, &bench_cli);

  ConfigCli noise_cli;
  std::string noise_labels, noise_cloud, noise_out;
  std::uint64_t noise_k = 20;
  CLI::App* noise_cmd = app.add_subcommand("noise", "Inject per-object noise points into a cloud");
  noise_cmd->add_option("--labels", noise_labels, "label file defining the objects")->required();
  noise_cmd->add_option("--cloud", noise_cloud, "input point cloud .bin");
  noise_cmd->add_option("--k", noise_k, "points per object");
  noise_cmd->add_option("--out", noise_out, "write the augmented cloud here");
  add_config_options(noise_cmd, &noise_cli);

  CLI11_PARSE(app, argc, argv);

  try {
    if (vox->parsed()) return cmd_voxelize(vox_cli, vox_cloud);
    if (match_cmd->parsed()) return cmd_match(match_cli, match_preds, match_labels);
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_cli, eval_gts, eval_dets, eval_clouds, eval_calib,
                      !eval_no_noise);
    }
    if (bench_cmd->parsed()) return cmd_iou_bench(bench_cli, bench_pairs, bench_reps);
    if (noise_cmd->parsed()) {
      return cmd_noise(noise_cli, noise_labels, noise_cloud, noise_k, noise_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
