#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "lge/error.hpp"
#include "lge/phantom.hpp"
#include "lge/volume.hpp"
#include "oracles.hpp"

using namespace lge;

TEST(ClassSet, DerivedGroupsAreNotStoredCodes) {
  EXPECT_TRUE(kMyocardium.contains(ClassId::remote_myocardium));
  EXPECT_TRUE(kMyocardium.contains(ClassId::scar));
  EXPECT_TRUE(kMyocardium.contains(ClassId::mvo));
  EXPECT_FALSE(kMyocardium.contains(ClassId::bloodpool));
  EXPECT_EQ(kInfarct, (ClassSet{ClassId::scar, ClassId::mvo}));
  EXPECT_FALSE(kInfarct.contains(std::uint8_t{7}));
  for (std::uint8_t c = 0; c < 10; ++c) EXPECT_EQ(is_valid_class_code(c), c < 5);
}

TEST(ClassSet, ParsesNamesAndUnions) {
  EXPECT_EQ(parse_class_set("infarct"), kInfarct);
  EXPECT_EQ(parse_class_set("myocardium"), kMyocardium);
  EXPECT_EQ(parse_class_set("scar+mvo"), kInfarct);
  EXPECT_EQ(parse_class_set("mvo"), ClassSet{ClassId::mvo});
  EXPECT_THROW(parse_class_set("liver"), ValidationError);
  EXPECT_THROW(parse_class_set(""), ValidationError);
  for (int c = 0; c < kClassCount; ++c) {
    EXPECT_EQ(class_from_name(class_name(static_cast<ClassId>(c))), static_cast<ClassId>(c));
  }
}

TEST(Spacing, DerivedQuantities) {
  const Spacing s{2.2, 1.6, 8.0, 2.0};
  EXPECT_DOUBLE_EQ(s.effective_slice_spacing(), 10.0);
  EXPECT_DOUBLE_EQ(s.voxel_volume_mm3(), 2.2 * 1.6 * 10.0);
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW((Spacing{0.0, 1, 1, 1}.validate()), ValidationError);
  EXPECT_THROW((Spacing{1, 1, 1, -0.5}.validate()), ValidationError);
  EXPECT_THROW((Spacing{1, 1, 1, 0.0}.validate()), ValidationError);
}

TEST(MaskVolume, ValidateRejectsBadPayloads) {
  MaskVolume v = MaskVolume::zeros({4, 4, 2}, {1, 1, 1, 1});
  EXPECT_NO_THROW(v.validate());
  v.labels[5] = 5;
  EXPECT_THROW(v.validate(), ValidationError);
  v.labels[5] = 0;
  v.labels.pop_back();
  EXPECT_THROW(v.validate(), ValidationError);
}

TEST(MaskVolume, SliceAccessRoundTrips) {
  MaskVolume v = MaskVolume::zeros({3, 2, 2}, {1, 1, 1, 1});
  Mask2D labels(3, 2, std::uint8_t{2});
  labels(1, 1) = 3;
  v.set_label_slice(1, labels);
  EXPECT_EQ(v.label_slice(1), labels);
  EXPECT_EQ(v.labels[v.index(1, 1, 1)], 3);
  EXPECT_EQ(v.label_slice(0), Mask2D(3, 2));
}

TEST(ClassVolume, HandEvaluatedExample) {
  MaskVolume v = MaskVolume::zeros({5, 5, 1}, {2, 2, 8, 2});
  for (int i = 0; i < 10; ++i) v.labels[i] = code_of(ClassId::scar);
  EXPECT_NEAR(class_volume_ml(v, ClassSet{ClassId::scar}), 0.4, 1e-12);
  EXPECT_EQ(class_volume_ml(v, ClassSet{ClassId::mvo}), 0.0);
  EXPECT_EQ(count_voxels(v, kInfarct), 10u);
}

TEST(VolumeIo, MinimalVolume) {
  oracle::TempDir tmp;
  MaskVolume v = MaskVolume::zeros({1, 1, 1}, {1, 1, 1, 0.5});
  save_volume(v, tmp / "v");
  const MaskVolume back = load_volume(tmp / "v");
  EXPECT_EQ(back.dims, (Dims{1, 1, 1}));
  EXPECT_EQ(back, v);
}

TEST(VolumeIo, RoundTripAndByteDeterminism) {
  oracle::TempDir tmp;
  PhantomSpec spec;
  spec.dims = {16, 16, 3};
  spec.center_x = spec.center_y = 8;
  spec.inner_radius_px = 3;
  spec.outer_radius_px = 6;
  spec.scar = {{0.0, 1.5}, {0, 3}};
  spec.noise_sd = 4.0;
  spec.seed = 3;
  spec.patient_id = "p, \"quoted\"";
  const MaskVolume v = make_phantom(spec).volume;
  save_volume(v, tmp / "a");
  save_volume(v, tmp / "b");
  EXPECT_EQ(load_volume(tmp / "a"), v);
  for (const char* f : {"meta.json", "image.raw", "labels.raw"}) {
    EXPECT_EQ(oracle::read_file(tmp / "a" / f), oracle::read_file(tmp / "b" / f)) << f;
  }
  EXPECT_EQ(std::filesystem::file_size(tmp / "a" / "image.raw"), 16u * 16 * 3 * 4);
  EXPECT_EQ(std::filesystem::file_size(tmp / "a" / "labels.raw"), 16u * 16 * 3);
  const auto meta = nlohmann::json::parse(oracle::read_file(tmp / "a" / "meta.json"));
  EXPECT_EQ(meta["dims"], nlohmann::json({16, 16, 3}));
  EXPECT_EQ(meta["labels"]["3"], "scar");
  EXPECT_DOUBLE_EQ(meta["spacing"]["interslice_gap"].get<double>(), 2.0);
}

TEST(VolumeIo, DimsMismatchAndMissingFiles) {
  oracle::TempDir tmp;
  MaskVolume v = MaskVolume::zeros({4, 4, 2}, {1, 1, 1, 1});
  save_volume(v, tmp / "v");
  {
    std::ofstream f(tmp / "v" / "labels.raw", std::ios::binary | std::ios::trunc);
    f << std::string(31, '\0');
  }
  EXPECT_THROW(load_volume(tmp / "v"), ValidationError);
  EXPECT_THROW(load_volume(tmp / "nothing"), IoError);
  std::filesystem::remove(tmp / "v" / "image.raw");
  EXPECT_THROW(load_volume(tmp / "v"), IoError);
}

TEST(VolumeIo, InvalidLabelCodeOnDisk) {
  oracle::TempDir tmp;
  MaskVolume v = MaskVolume::zeros({2, 2, 1}, {1, 1, 1, 1});
  save_volume(v, tmp / "v");
  {
    std::ofstream f(tmp / "v" / "labels.raw", std::ios::binary | std::ios::trunc);
    f << std::string("\x00\x01\x09\x00", 4);
  }
  EXPECT_THROW(load_volume(tmp / "v"), ValidationError);
}
