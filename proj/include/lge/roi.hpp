#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lge/grid.hpp"
#include "lge/volume.hpp"

namespace lge {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Size2 {
  int width = 128;
  int height = 128;
};

// In-plane crop window centred on an integer pixel. Regions outside the
// source grid read as zero.
struct CropSpec {
  Pixel center;
  Size2 size;

  int x0() const { return center.x - size.width / 2; }
  int y0() const { return center.y - size.height / 2; }
};

inline constexpr Size2 kDefaultRoiSize{128, 128};

int middle_slice_index(int nz);

// Mean foreground coordinate, or nullopt for an empty mask.
std::optional<Point2> center_of_mass(const Mask2D& mask);

// Centred window of `image` at `target` size. When the size difference along
// an axis is odd, cropping drops the extra row/column on the high-index side
// and padding adds the extra zero row/column there.
template <typename T>
Grid2D<T> pad_crop_to(const Grid2D<T>& image, Size2 target) {
  if (image.empty()) throw ValidationError("pad_crop_to: empty image");
  if (target.width < 1 || target.height < 1) throw ValidationError("pad_crop_to: bad target");
  const auto shift = [](int n, int t) { return n >= t ? (n - t) / 2 : -((t - n) / 2); };
  const int sx = shift(image.width(), target.width);
  const int sy = shift(image.height(), target.height);
  Grid2D<T> out(target.width, target.height);
  for (int y = 0; y < target.height; ++y) {
    for (int x = 0; x < target.width; ++x) {
      const int ix = x + sx;
      const int iy = y + sy;
      if (image.contains(ix, iy)) out(x, y) = image(ix, iy);
    }
  }
  return out;
}

template <typename T>
Grid2D<T> apply_crop(const Grid2D<T>& image, const CropSpec& crop) {
  Grid2D<T> out(crop.size.width, crop.size.height);
  const int x0 = crop.x0();
  const int y0 = crop.y0();
  for (int y = 0; y < crop.size.height; ++y) {
    for (int x = 0; x < crop.size.width; ++x) {
      if (image.contains(x0 + x, y0 + y)) out(x, y) = image(x0 + x, y0 + y);
    }
  }
  return out;
}

// Locates the LV centre on the middle slice of `lv_mask` (falling back to the
// 3D centroid, then to the image centre) and crops every slice around it.
CropSpec locate_roi(const MaskVolume& volume, std::span<const std::uint8_t> lv_mask, Size2 size);
MaskVolume extract_roi_stack(const MaskVolume& volume, std::span<const std::uint8_t> lv_mask,
                             Size2 size);

// Zero mean, unit population SD. Near-constant input maps to zeros.
std::vector<float> normalize(std::span<const float> values);

}  // namespace lge
