#pragma once

#include <string>
#include <vector>

#include "lge/grid.hpp"
#include "lge/volume.hpp"

namespace lge {

// Remote (non-infarcted) myocardium sample on one slice.
struct RemoteRoi {
  int slice_index = 0;
  std::vector<Pixel> pixels;
};

struct RemoteStats {
  double mean = 0.0;
  double sd = 0.0;  // population SD
};

struct ThresholdReport {
  double mean = 0.0;
  double sd = 0.0;
  double k = 5.0;
  double threshold = 0.0;
  std::vector<double> per_slice_area_mm2;
  double total_volume_ml = 0.0;
};

struct Seg5sdOptions {
  double k = 5.0;
  // Lower bound applied to the ROI SD before thresholding; lets noiseless
  // inputs separate remote from enhanced tissue.
  double min_sd = 0.0;
  // Marked components smaller than this many pixels (8-connected) are dropped.
  std::size_t min_component_px = 1;
};

// Throws on an empty ROI or out-of-bounds pixels. Returns warnings for ROI
// pixels not labelled remote myocardium.
std::vector<std::string> validate_roi(const MaskVolume& volume, const RemoteRoi& roi);

RemoteStats remote_stats(const Image2D& image, const RemoteRoi& roi);

// Pixel is marked iff it is myocardium and intensity >= mean + k * sd.
Mask2D threshold_5sd(const Image2D& image, const Mask2D& myocardium, double mean, double sd,
                     double k = 5.0);

// Per-slice hyperenhanced area and total volume using gap-inclusive spacing.
ThresholdReport infarct_report(const MaskVolume& volume, const std::vector<Mask2D>& scar_masks);

// Remote-labelled pixels of the slice with the most of them (lowest index on
// ties). Throws when the volume holds no remote myocardium.
RemoteRoi default_remote_roi(const MaskVolume& volume);

struct Seg5sdResult {
  ThresholdReport report;
  std::vector<Mask2D> scar_masks;
  std::vector<std::string> warnings;
};

// Full protocol: remote ROI statistics, threshold within the labelled
// myocardium of every slice, optional small-component filter, report.
Seg5sdResult segment_5sd(const MaskVolume& volume, const RemoteRoi& roi,
                         const Seg5sdOptions& options = {});

}  // namespace lge
