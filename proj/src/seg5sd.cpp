#include "lge/seg5sd.hpp"

#include <algorithm>
#include <cmath>

#include "lge/components.hpp"

namespace lge {

std::vector<std::string> validate_roi(const MaskVolume& volume, const RemoteRoi& roi) {
  if (roi.pixels.empty()) throw ValidationError("remote ROI is empty");
  if (roi.slice_index < 0 || roi.slice_index >= volume.dims.nz) {
    throw ValidationError("remote ROI slice out of range");
  }
  std::vector<std::string> warnings;
  std::size_t off_label = 0;
  for (const Pixel& p : roi.pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= volume.dims.nx || p.y >= volume.dims.ny) {
      throw ValidationError("remote ROI pixel (" + std::to_string(p.x) + "," +
                            std::to_string(p.y) + ") out of bounds");
    }
    if (volume.labels[volume.index(p.x, p.y, roi.slice_index)] !=
        code_of(ClassId::remote_myocardium)) {
      ++off_label;
    }
  }
  if (off_label > 0) {
    warnings.push_back(std::to_string(off_label) +
                       " remote ROI pixel(s) are not labelled remote myocardium");
  }
  return warnings;
}

RemoteStats remote_stats(const Image2D& image, const RemoteRoi& roi) {
  if (roi.pixels.empty()) throw ValidationError("remote ROI is empty");
  double sum = 0.0;
  for (const Pixel& p : roi.pixels) {
    if (!image.contains(p.x, p.y)) throw ValidationError("remote ROI pixel out of bounds");
    sum += image(p.x, p.y);
  }
  const double n = static_cast<double>(roi.pixels.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const Pixel& p : roi.pixels) {
    const double d = image(p.x, p.y) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / n)};
}

Mask2D threshold_5sd(const Image2D& image, const Mask2D& myocardium, double mean, double sd,
                     double k) {
  if (image.width() != myocardium.width() || image.height() != myocardium.height()) {
    throw ValidationError("image and myocardium mask differ in size");
  }
  const double threshold = mean + k * sd;
  Mask2D out(image.width(), image.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = (myocardium.data()[i] != 0 && image.data()[i] >= threshold) ? 1 : 0;
  }
  return out;
}

ThresholdReport infarct_report(const MaskVolume& volume, const std::vector<Mask2D>& scar_masks) {
  if (scar_masks.size() != static_cast<std::size_t>(volume.dims.nz)) {
    throw ValidationError("one scar mask per slice is required");
  }
  ThresholdReport report;
  double total_area = 0.0;
  for (const Mask2D& m : scar_masks) {
    if (m.width() != volume.dims.nx || m.height() != volume.dims.ny) {
      throw ValidationError("scar mask dims do not match the volume");
    }
    const auto marked = std::count_if(m.data().begin(), m.data().end(),
                                      [](std::uint8_t v) { return v != 0; });
    const double area = static_cast<double>(marked) * volume.spacing.pixel_area_mm2();
    report.per_slice_area_mm2.push_back(area);
    total_area += area;
  }
  report.total_volume_ml = total_area * volume.spacing.effective_slice_spacing() / 1000.0;
  return report;
}

RemoteRoi default_remote_roi(const MaskVolume& volume) {
  RemoteRoi best;
  for (int z = 0; z < volume.dims.nz; ++z) {
    RemoteRoi candidate{z, {}};
    for (int y = 0; y < volume.dims.ny; ++y) {
      for (int x = 0; x < volume.dims.nx; ++x) {
        if (volume.labels[volume.index(x, y, z)] == code_of(ClassId::remote_myocardium)) {
          candidate.pixels.push_back({x, y});
        }
      }
    }
    if (candidate.pixels.size() > best.pixels.size()) best = std::move(candidate);
  }
  if (best.pixels.empty()) throw ValidationError("volume has no remote myocardium for the ROI");
  return best;
}

Seg5sdResult segment_5sd(const MaskVolume& volume, const RemoteRoi& roi,
                         const Seg5sdOptions& options) {
  Seg5sdResult result;
  result.warnings = validate_roi(volume, roi);
  const RemoteStats stats = remote_stats(volume.image_slice(roi.slice_index), roi);
  const double sd = std::max(stats.sd, options.min_sd);

  for (int z = 0; z < volume.dims.nz; ++z) {
    const Mask2D myo = class_mask(volume.label_slice(z), kMyocardium);
    Mask2D marked = threshold_5sd(volume.image_slice(z), myo, stats.mean, sd, options.k);
    result.scar_masks.push_back(remove_small_components(marked, options.min_component_px));
  }
  result.report = infarct_report(volume, result.scar_masks);
  result.report.mean = stats.mean;
  result.report.sd = sd;
  result.report.k = options.k;
  result.report.threshold = stats.mean + options.k * sd;
  return result;
}

}  // namespace lge
