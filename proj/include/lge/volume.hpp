#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "lge/grid.hpp"

namespace lge {

enum class ClassId : std::uint8_t {
  background = 0,
  bloodpool = 1,
  remote_myocardium = 2,
  scar = 3,
  mvo = 4,
};

inline constexpr int kClassCount = 5;

constexpr bool is_valid_class_code(std::uint8_t code) { return code < kClassCount; }
constexpr std::uint8_t code_of(ClassId c) { return static_cast<std::uint8_t>(c); }

std::string_view class_name(ClassId c);
ClassId class_from_name(std::string_view name);

// Set of label codes. Derived groupings ("myocardium", "infarct") are built
// on demand and never stored in a label volume.
class ClassSet {
 public:
  constexpr ClassSet() = default;
  constexpr ClassSet(std::initializer_list<ClassId> classes) {
    for (ClassId c : classes) bits_ |= static_cast<std::uint8_t>(1u << code_of(c));
  }

  constexpr bool contains(std::uint8_t code) const {
    return code < kClassCount && ((bits_ >> code) & 1u) != 0;
  }
  constexpr bool contains(ClassId c) const { return contains(code_of(c)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr ClassSet operator|(ClassSet other) const {
    ClassSet out;
    out.bits_ = bits_ | other.bits_;
    return out;
  }
  constexpr ClassSet operator&(ClassSet other) const {
    ClassSet out;
    out.bits_ = bits_ & other.bits_;
    return out;
  }
  friend constexpr bool operator==(ClassSet, ClassSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr ClassSet kMyocardium{ClassId::remote_myocardium, ClassId::scar, ClassId::mvo};
inline constexpr ClassSet kInfarct{ClassId::scar, ClassId::mvo};
inline constexpr ClassSet kLeftVentricle{ClassId::bloodpool, ClassId::remote_myocardium,
                                         ClassId::scar, ClassId::mvo};

// Parses "scar", "mvo", "infarct", "myocardium", "lv", or a '+'-joined list
// of class names such as "scar+mvo".
ClassSet parse_class_set(std::string_view text);

struct Spacing {
  double dx = 1.0;               // mm per pixel along x
  double dy = 1.0;               // mm per pixel along y
  double slice_thickness = 1.0;  // mm
  double interslice_gap = 0.0;   // mm

  double effective_slice_spacing() const { return slice_thickness + interslice_gap; }
  double voxel_volume_mm3() const { return dx * dy * effective_slice_spacing(); }
  double pixel_area_mm2() const { return dx * dy; }

  // Throws ValidationError unless every field is strictly positive.
  void validate() const;

  friend bool operator==(const Spacing&, const Spacing&) = default;
};

struct Dims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t slice_size() const { return static_cast<std::size_t>(nx) * ny; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

// Co-registered intensity and label volumes plus geometry. Slices are
// ordered base to apex; storage is x-fastest, then y, then z.
struct MaskVolume {
  Dims dims;
  std::vector<float> image;
  std::vector<std::uint8_t> labels;
  Spacing spacing;
  std::string patient_id;
  std::string series_id;

  static MaskVolume zeros(Dims dims, Spacing spacing);

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * dims.ny + y) * dims.nx + x;
  }

  // Throws ValidationError on dims/payload mismatch or an invalid label code.
  void validate() const;

  Image2D image_slice(int z) const;
  Mask2D label_slice(int z) const;
  void set_image_slice(int z, const Image2D& slice);
  void set_label_slice(int z, const Mask2D& slice);

  friend bool operator==(const MaskVolume&, const MaskVolume&) = default;
};

// Binary mask of voxels whose label lies in `classes`, same layout as labels.
std::vector<std::uint8_t> class_mask(const MaskVolume& volume, ClassSet classes);
Mask2D class_mask(const Mask2D& labels, ClassSet classes);

std::size_t count_voxels(const MaskVolume& volume, ClassSet classes);

double class_volume_ml(const MaskVolume& volume, ClassSet classes);

// Directory container: meta.json + image.raw (float32 LE) + labels.raw (u8).
MaskVolume load_volume(const std::filesystem::path& dir);
void save_volume(const MaskVolume& volume, const std::filesystem::path& dir);

}  // namespace lge
