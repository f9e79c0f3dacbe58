#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "lge/volume.hpp"

namespace lge {

// Half-open slice interval [begin, end).
struct SliceRange {
  int begin = 0;
  int end = 0;
  bool contains(int z) const { return z >= begin && z < end; }
  bool empty() const { return end <= begin; }
};

// Counter-clockwise sector starting at `start` rad and spanning `end - start`
// rad (at most 2*pi). start == end is an empty sector.
struct AngleRange {
  double start = 0.0;
  double end = 0.0;
  double span() const { return end - start; }
  bool contains(double angle) const;
};

struct ScarWedge {
  AngleRange angles;
  SliceRange slices;
};

struct MvoCore {
  AngleRange angles;
  double inner_radius_px = 0.0;  // radial band [inner, outer)
  double outer_radius_px = 0.0;
  SliceRange slices;
};

struct PhantomIntensities {
  float background = 0.0f;
  float blood = 0.0f;
  float remote = 0.0f;
  float scar = 0.0f;
  float mvo = 0.0f;
};

// Analytic LV: bloodpool disk, myocardial annulus, scar wedge and an optional
// MVO core inside the wedge.
struct PhantomSpec {
  Dims dims{64, 64, 8};
  Spacing spacing{2.2, 1.6, 8.0, 2.0};
  double inner_radius_px = 10.0;
  double outer_radius_px = 16.0;
  double center_x = 32.0;
  double center_y = 32.0;
  ScarWedge scar{};
  std::optional<MvoCore> mvo;
  PhantomIntensities intensities{0.0f, 60.0f, 100.0f, 200.0f, 90.0f};
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  std::string patient_id = "phantom";
  std::string series_id = "lge";

  void validate() const;
};

struct GroundTruth {
  std::array<std::size_t, kClassCount> voxel_counts{};
  std::array<double, kClassCount> volumes_ml{};
};

struct Phantom {
  MaskVolume volume;
  GroundTruth truth;
};

// Region membership of one pixel centre under the spec (no noise).
ClassId phantom_class_at(const PhantomSpec& spec, int x, int y, int z);

Phantom make_phantom(const PhantomSpec& spec);

}  // namespace lge
