#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lge/error.hpp"
#include "lge/metrics.hpp"
#include "lge/phantom.hpp"
#include "lge/seg5sd.hpp"

using namespace lge;

TEST(RemoteStats, Examples) {
  Image2D img(3, 1, std::vector<float>{100, 100, 100});
  RemoteStats s = remote_stats(img, {0, {{0, 0}, {1, 0}, {2, 0}}});
  EXPECT_DOUBLE_EQ(s.mean, 100);
  EXPECT_DOUBLE_EQ(s.sd, 0);
  Image2D two(2, 1, std::vector<float>{90, 110});
  s = remote_stats(two, {0, {{0, 0}, {1, 0}}});
  EXPECT_DOUBLE_EQ(s.mean, 100);
  EXPECT_DOUBLE_EQ(s.sd, 10);
}

TEST(RemoteStats, MatchesDefinitionalMoments) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> val(0, 500);
  Image2D img(20, 20);
  for (auto& v : img.data()) v = val(rng);
  RemoteRoi roi;
  std::uniform_int_distribution<int> coord(0, 19);
  for (int i = 0; i < 50; ++i) roi.pixels.push_back({coord(rng), coord(rng)});
  double sum = 0;
  for (auto p : roi.pixels) sum += img(p.x, p.y);
  const double mean = sum / 50.0;
  double ss = 0;
  for (auto p : roi.pixels) ss += (img(p.x, p.y) - mean) * (img(p.x, p.y) - mean);
  const RemoteStats s = remote_stats(img, roi);
  EXPECT_NEAR(s.mean, mean, 1e-9 * mean);
  EXPECT_NEAR(s.sd, std::sqrt(ss / 50.0), 1e-9 * std::sqrt(ss / 50.0));
}

TEST(Threshold, GreaterOrEqualConvention) {
  Image2D img(3, 1, std::vector<float>{150.0f, 149.9f, 200.0f});
  Mask2D myo(3, 1, std::uint8_t{1});
  myo(2, 0) = 0;
  const Mask2D m = threshold_5sd(img, myo, 100, 10, 5);
  EXPECT_EQ(m(0, 0), 1);
  EXPECT_EQ(m(1, 0), 0);
  EXPECT_EQ(m(2, 0), 0);  // outside the myocardium
  const Mask2D zero_sd = threshold_5sd(img, Mask2D(3, 1, std::uint8_t{1}), 150, 0, 5);
  EXPECT_EQ(zero_sd(0, 0), 1);
  EXPECT_EQ(zero_sd(1, 0), 0);
  EXPECT_EQ(zero_sd(2, 0), 1);
}

TEST(InfarctReport, FormulaExamples) {
  MaskVolume v = MaskVolume::zeros({10, 10, 2}, {2, 2, 8, 2});
  std::vector<Mask2D> masks(2, Mask2D(10, 10));
  EXPECT_EQ(infarct_report(v, masks).total_volume_ml, 0.0);
  for (int i = 0; i < 10; ++i) masks[0].data()[i] = 1;
  ThresholdReport r = infarct_report(v, masks);
  EXPECT_DOUBLE_EQ(r.per_slice_area_mm2[0], 40.0);
  EXPECT_NEAR(r.total_volume_ml, 0.4, 1e-12);
  for (int i = 0; i < 15; ++i) masks[1].data()[i] = 1;
  r = infarct_report(v, masks);
  EXPECT_NEAR(r.total_volume_ml, 1.0, 1e-12);
}

TEST(Seg5sd, DefaultRoiAndValidation) {
  PhantomSpec spec;
  spec.scar = {{0.0, 1.0}, {2, 8}};
  const MaskVolume v = make_phantom(spec).volume;
  const RemoteRoi roi = default_remote_roi(v);
  EXPECT_EQ(roi.slice_index, 0);  // slices 0-1 carry no scar
  EXPECT_TRUE(validate_roi(v, roi).empty());
  RemoteRoi bad = roi;
  bad.pixels.push_back({32, 32});  // bloodpool
  EXPECT_EQ(validate_roi(v, bad).size(), 1u);
  bad.pixels.push_back({64, 0});
  EXPECT_THROW(validate_roi(v, bad), ValidationError);
  EXPECT_THROW(validate_roi(v, RemoteRoi{0, {}}), ValidationError);
  EXPECT_THROW(default_remote_roi(MaskVolume::zeros({4, 4, 1}, {1, 1, 1, 1})), ValidationError);
}

TEST(Seg5sd, NoiselessPhantomRecoversWedgeExactly) {
  PhantomSpec spec;
  spec.scar = {{0.5, 1.8}, {0, 8}};
  spec.intensities.mvo = 200.0f;  // MVO not separated by thresholding here
  const Phantom p = make_phantom(spec);
  const Seg5sdResult r =
      segment_5sd(p.volume, default_remote_roi(p.volume), {5.0, 1e-3, 1});
  for (int z = 0; z < 8; ++z) {
    const Mask2D truth = class_mask(p.volume.label_slice(z), kInfarct);
    ASSERT_EQ(r.scar_masks[static_cast<std::size_t>(z)], truth) << "slice " << z;
  }
  EXPECT_NEAR(r.report.total_volume_ml, class_volume_ml(p.volume, kInfarct), 1e-9);
  EXPECT_DOUBLE_EQ(r.report.threshold, 100.0 + 5.0 * 1e-3);
}

TEST(Seg5sd, SmallComponentFilter) {
  PhantomSpec spec;
  spec.scar = {{0.5, 1.8}, {0, 8}};
  spec.noise_sd = 14.0;
  spec.seed = 21;
  const Phantom p = make_phantom(spec);
  const RemoteRoi roi = default_remote_roi(p.volume);
  const auto loose = segment_5sd(p.volume, roi, {5.0, 0.0, 1});
  const auto strict = segment_5sd(p.volume, roi, {5.0, 0.0, 5});
  EXPECT_LE(strict.report.total_volume_ml, loose.report.total_volume_ml);
}
