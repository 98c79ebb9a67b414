#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "detkit/kitti.hpp"

namespace detkit {
namespace {

constexpr double kPi = std::numbers::pi;

const char kCanonicalLine[] =
    "Car 0.00 0 1.85 387.63 181.54 423.81 203.12 "
    "1.67 1.87 3.69 -16.53 2.39 58.49 1.57";

TEST(LabelParse, CanonicalLine) {
  const KittiLabel label = parse_label_line(kCanonicalLine, 1);
  EXPECT_EQ(label.category, "Car");
  EXPECT_DOUBLE_EQ(label.truncation, 0.0);
  EXPECT_EQ(label.occlusion, 0);
  EXPECT_DOUBLE_EQ(label.alpha, 1.85);
  EXPECT_DOUBLE_EQ(label.left, 387.63);
  EXPECT_DOUBLE_EQ(label.top, 181.54);
  EXPECT_DOUBLE_EQ(label.right, 423.81);
  EXPECT_DOUBLE_EQ(label.bottom, 203.12);
  EXPECT_DOUBLE_EQ(label.height, 1.67);
  EXPECT_DOUBLE_EQ(label.width, 1.87);
  EXPECT_DOUBLE_EQ(label.length, 3.69);
  EXPECT_DOUBLE_EQ(label.x, -16.53);
  EXPECT_DOUBLE_EQ(label.y, 2.39);
  EXPECT_DOUBLE_EQ(label.z, 58.49);
  EXPECT_DOUBLE_EQ(label.rotation_y, 1.57);
  EXPECT_FALSE(label.score.has_value());
}

TEST(LabelParse, ScoreField) {
  const KittiLabel label =
      parse_label_line(std::string(kCanonicalLine) + " 0.91", 1);
  ASSERT_TRUE(label.score.has_value());
  EXPECT_DOUBLE_EQ(*label.score, 0.91);
}

TEST(LabelParse, ErrorsNameTheLine) {
  try {
    parse_label_line("Car 0.0 0 1.85", 7);
    FAIL() << "expected a throw";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos);
  }
  try {
    parse_label_file("Car 0.00 0 1.85 1 2 3 4 1.5 1.6 3.9 1 2 3 bogus\n");
    FAIL() << "expected a throw";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(LabelParse, FileWithBlankLines) {
  const std::string text = std::string(kCanonicalLine) + "\n\n" +
                           kCanonicalLine + " 0.5\n";
  const auto labels = parse_label_file(text);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_FALSE(labels[0].score.has_value());
  EXPECT_TRUE(labels[1].score.has_value());
}

TEST(LabelParse, FormatRoundTrip) {
  KittiLabel label = parse_label_line(kCanonicalLine, 1);
  const KittiLabel again = parse_label_line(format_label(label), 1);
  EXPECT_EQ(again.category, label.category);
  EXPECT_DOUBLE_EQ(again.x, label.x);
  EXPECT_DOUBLE_EQ(again.rotation_y, label.rotation_y);
  EXPECT_FALSE(again.score.has_value());
  label.score = 0.625;
  const KittiLabel scored = parse_label_line(format_label(label), 1);
  ASSERT_TRUE(scored.score.has_value());
  EXPECT_DOUBLE_EQ(*scored.score, 0.625);
}

TEST(Pointcloud, BinaryRoundTrip) {
  std::vector<PointXYZI> points = {
      {1.5f, -2.25f, 0.125f, 0.5f},
      {70.0f, 39.5f, -2.5f, 0.0f},
  };
  const std::string bytes = format_pointcloud_bin(points);
  EXPECT_EQ(bytes.size(), 32u);
  const auto back = parse_pointcloud_bin(bytes);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].x, 1.5f);
  EXPECT_EQ(back[0].intensity, 0.5f);
  EXPECT_EQ(back[1].y, 39.5f);
  EXPECT_THROW(parse_pointcloud_bin(bytes.substr(0, 15)), std::runtime_error);
}

TEST(Difficulty, BucketRules) {
  KittiLabel label;
  label.top = 100.0;
  label.bottom = 150.0;  // box height 50 px
  label.occlusion = 0;
  label.truncation = 0.10;
  EXPECT_EQ(difficulty_of(label), Difficulty::kEasy);
  label.bottom = 130.0;  // 30 px: below the 40 px easy cut
  EXPECT_EQ(difficulty_of(label), Difficulty::kModerate);
  label.occlusion = 1;
  EXPECT_EQ(difficulty_of(label), Difficulty::kModerate);
  label.truncation = 0.20;
  EXPECT_EQ(difficulty_of(label), Difficulty::kModerate);
  label.occlusion = 2;
  EXPECT_EQ(difficulty_of(label), Difficulty::kHard);
  label.truncation = 0.60;  // beyond every rule
  EXPECT_EQ(difficulty_of(label), Difficulty::kIgnored);
  label.truncation = 0.10;
  label.occlusion = 0;
  label.bottom = 120.0;  // 20 px: too small for any bucket
  EXPECT_EQ(difficulty_of(label), Difficulty::kIgnored);
}

TEST(Difficulty, BoundariesAreInclusive) {
  KittiLabel label;
  label.top = 0.0;
  label.bottom = 40.0;
  label.occlusion = 0;
  label.truncation = 0.15;
  EXPECT_EQ(difficulty_of(label), Difficulty::kEasy);
  label.bottom = 25.0;
  label.truncation = 0.30;
  label.occlusion = 1;
  EXPECT_EQ(difficulty_of(label), Difficulty::kModerate);
  label.truncation = 0.50;
  label.occlusion = 2;
  EXPECT_EQ(difficulty_of(label), Difficulty::kHard);
}

TEST(Calib, ParseAndDefaults) {
  const std::string text =
      "P2: 1 0 0 0 0 1 0 0 0 0 1 0\n"
      "R0_rect: 1 0 0 0 1 0 0 0 1\n"
      "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n";
  const Calibration calib = parse_calib_file(text);
  EXPECT_DOUBLE_EQ(calib.r0_rect[0], 1.0);
  EXPECT_DOUBLE_EQ(calib.tr_velo_to_cam[1], -1.0);
  EXPECT_THROW(parse_calib_file("R0_rect: 1 0 0 0 1 0 0 0 1\n"),
               std::runtime_error);
  EXPECT_THROW(parse_calib_file("Tr_velo_to_cam: 0 0 0 0 0 0 0 0 0 0 0 0\n"),
               std::runtime_error);
}

TEST(LidarBox, NoCalibTakesLocationDirectly) {
  KittiLabel label;
  label.category = "Car";
  label.height = 1.5;
  label.width = 1.7;
  label.length = 4.0;
  label.x = 12.0;
  label.y = -3.0;
  label.z = -0.5;
  label.rotation_y = 0.3;
  const Box3D box = label_to_lidar_box(label, nullptr);
  EXPECT_DOUBLE_EQ(box.cx, 12.0);
  EXPECT_DOUBLE_EQ(box.cy, -3.0);
  EXPECT_DOUBLE_EQ(box.cz, -0.5);
  EXPECT_DOUBLE_EQ(box.w, 1.7);
  EXPECT_DOUBLE_EQ(box.l, 4.0);
  EXPECT_DOUBLE_EQ(box.h, 1.5);
  EXPECT_DOUBLE_EQ(box.yaw, 0.3);
}

// Camera frame: x right, y down, z forward. LiDAR frame: x forward, y left,
// z up. The canonical mounting is cam_x = -velo_y, cam_y = -velo_z,
// cam_z = velo_x, which the rotation below encodes.
TEST(LidarBox, CanonicalMountingWithoutOffset) {
  Calibration calib;
  calib.r0_rect = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  calib.tr_velo_to_cam = {0, -1, 0, 0,
                          0, 0, -1, 0,
                          1, 0, 0, 0};
  KittiLabel label;
  label.height = 1.5;
  label.width = 1.7;
  label.length = 4.0;
  label.x = 2.0;   // cam right -> velo -y
  label.y = 1.0;   // cam down -> velo -z; this is the box bottom
  label.z = 10.0;  // cam forward -> velo x
  label.rotation_y = 0.25;
  const Box3D box = label_to_lidar_box(label, &calib);
  EXPECT_NEAR(box.cx, 10.0, 1e-12);
  EXPECT_NEAR(box.cy, -2.0, 1e-12);
  EXPECT_NEAR(box.cz, -1.0 + 0.75, 1e-12);  // bottom lifted by h/2
  EXPECT_NEAR(box.yaw, -0.25 - kPi / 2, 1e-12);
  EXPECT_DOUBLE_EQ(box.w, 1.7);
  EXPECT_DOUBLE_EQ(box.l, 4.0);
  EXPECT_DOUBLE_EQ(box.h, 1.5);
}

TEST(LidarBox, TranslationIsUndone) {
  Calibration calib;
  calib.tr_velo_to_cam = {0, -1, 0, 0.1,
                          0, 0, -1, 0.2,
                          1, 0, 0, 0.3};
  KittiLabel label;
  label.height = 1.5;
  label.width = 1.7;
  label.length = 4.0;
  label.x = 2.0;
  label.y = 1.0;
  label.z = 10.0;
  label.rotation_y = 0.0;
  const Box3D box = label_to_lidar_box(label, &calib);
  // p_velo = R^T (p_cam - t) with the rotation above.
  EXPECT_NEAR(box.cx, 9.7, 1e-12);
  EXPECT_NEAR(box.cy, -1.9, 1e-12);
  EXPECT_NEAR(box.cz, -0.8 + 0.75, 1e-12);
}

TEST(LidarBox, RoundTripThroughCalibration) {
  // Push a LiDAR point into the camera frame by hand, write it as a label,
  // and check label_to_lidar_box lands back on the original center.
  Calibration calib;
  calib.tr_velo_to_cam = {0, -1, 0, -0.05,
                          0, 0, -1, -0.29,
                          1, 0, 0, -0.41};
  const double vx = 20.0, vy = 4.0, vz = -0.9;
  const double h = 1.48;
  // Bottom center in velo, then cam = R*p + t.
  const double bx = vx, by = vy, bz = vz - h / 2;
  KittiLabel label;
  label.height = h;
  label.width = 1.6;
  label.length = 3.9;
  label.x = -by - 0.05;
  label.y = -bz - 0.29;
  label.z = bx - 0.41;
  label.rotation_y = -1.2;
  const Box3D box = label_to_lidar_box(label, &calib);
  EXPECT_NEAR(box.cx, vx, 1e-12);
  EXPECT_NEAR(box.cy, vy, 1e-12);
  EXPECT_NEAR(box.cz, vz, 1e-12);
  EXPECT_NEAR(box.yaw, 1.2 - kPi / 2, 1e-12);
}

class DatasetDirs : public ::testing::Test {
 protected:
  void SetUp() override {
    // Unique per test: ctest runs discovered tests as parallel processes.
    const auto* info = testing::UnitTest::GetInstance()->current_test_info();
    root_ = std::filesystem::path(testing::TempDir()) /
            (std::string("detkit_dataset_") + info->name() + "_" +
             std::to_string(getpid()));
    std::filesystem::remove_all(root_);
    gts_ = (root_ / "gts").string();
    dets_ = (root_ / "dets").string();
    clouds_ = (root_ / "clouds").string();
    std::filesystem::create_directories(gts_);
    std::filesystem::create_directories(dets_);
    std::filesystem::create_directories(clouds_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }

  void write(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }

  std::filesystem::path root_;
  std::string gts_, dets_, clouds_;
};

TEST_F(DatasetDirs, LoadsMatchingStemsInOrder) {
  write(gts_ + "/000002.txt", std::string(kCanonicalLine) + "\n");
  write(gts_ + "/000001.txt", "");
  write(dets_ + "/000001.txt", std::string(kCanonicalLine) + " 0.9\n");
  write(dets_ + "/000002.txt", "");
  save_pointcloud(clouds_ + "/000001.bin", {{1.0f, 2.0f, 0.5f, 0.25f}});
  const auto frames = load_dataset(gts_, dets_, clouds_);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].id, "000001");
  EXPECT_EQ(frames[1].id, "000002");
  EXPECT_TRUE(frames[0].gts.empty());
  ASSERT_EQ(frames[0].dets.size(), 1u);
  EXPECT_DOUBLE_EQ(frames[0].dets[0].score, 0.9);
  EXPECT_EQ(frames[0].cloud.size(), 1u);
  ASSERT_EQ(frames[1].gts.size(), 1u);
  EXPECT_EQ(frames[1].gts[0].label.category, "Car");
  EXPECT_TRUE(frames[1].dets.empty());
  EXPECT_TRUE(frames[1].cloud.empty());
}

TEST_F(DatasetDirs, DetectionWithoutGtFrameThrows) {
  write(gts_ + "/000001.txt", "");
  write(dets_ + "/000009.txt", "");
  EXPECT_THROW(load_dataset(gts_, dets_), std::runtime_error);
}

TEST_F(DatasetDirs, LabelFileRoundTripOnDisk) {
  const auto labels = parse_label_file(std::string(kCanonicalLine) + "\n");
  const std::string path = gts_ + "/roundtrip.txt";
  save_label_file(path, labels);
  const auto back = load_label_file(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_DOUBLE_EQ(back[0].z, 58.49);
}

}  // namespace
}  // namespace detkit
