#include "lge/roi.hpp"

#include <cmath>

namespace lge {

int middle_slice_index(int nz) {
  if (nz < 1) throw ValidationError("slice count must be at least 1");
  return nz / 2;
}

std::optional<Point2> center_of_mass(const Mask2D& mask) {
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y) != 0) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return Point2{sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

CropSpec locate_roi(const MaskVolume& volume, std::span<const std::uint8_t> lv_mask, Size2 size) {
  if (lv_mask.size() != volume.dims.voxel_count()) {
    throw ValidationError("lv mask dims do not match the volume");
  }
  if (size.width < 1 || size.height < 1) throw ValidationError("roi size must be positive");

  const Dims& d = volume.dims;
  const int mid = middle_slice_index(d.nz);
  const auto slice_begin = lv_mask.begin() + static_cast<std::ptrdiff_t>(d.slice_size() * mid);
  Mask2D mid_mask(d.nx, d.ny,
                  std::vector<std::uint8_t>(
                      slice_begin, slice_begin + static_cast<std::ptrdiff_t>(d.slice_size())));

  std::optional<Point2> com = center_of_mass(mid_mask);
  if (!com) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (int z = 0; z < d.nz; ++z)
      for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x)
          if (lv_mask[volume.index(x, y, z)] != 0) {
            sx += x;
            sy += y;
            ++n;
          }
    if (n > 0) com = Point2{sx / static_cast<double>(n), sy / static_cast<double>(n)};
  }
  if (!com) com = Point2{(d.nx - 1) / 2.0, (d.ny - 1) / 2.0};

  return CropSpec{{static_cast<int>(std::lround(com->x)), static_cast<int>(std::lround(com->y))},
                  size};
}

MaskVolume extract_roi_stack(const MaskVolume& volume, std::span<const std::uint8_t> lv_mask,
                             Size2 size) {
  const CropSpec crop = locate_roi(volume, lv_mask, size);
  MaskVolume out = MaskVolume::zeros({size.width, size.height, volume.dims.nz}, volume.spacing);
  out.patient_id = volume.patient_id;
  out.series_id = volume.series_id;
  for (int z = 0; z < volume.dims.nz; ++z) {
    out.set_image_slice(z, apply_crop(volume.image_slice(z), crop));
    out.set_label_slice(z, apply_crop(volume.label_slice(z), crop));
  }
  return out;
}

std::vector<float> normalize(std::span<const float> values) {
  if (values.empty()) throw ValidationError("normalize: empty input");
  double sum = 0.0;
  for (float v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (float v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));

  std::vector<float> out(values.size(), 0.0f);
  if (sd < 1e-8) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<float>((values[i] - mean) / sd);
  }
  return out;
}

}  // namespace lge
