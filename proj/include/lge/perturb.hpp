#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lge/grid.hpp"
#include "lge/volume.hpp"

namespace lge {

using Rng = std::mt19937_64;

enum class PerturbationKind { delete_class, nullify, false_scar, false_mvo, intensity };
enum class DeleteTarget { scar, mvo, both };
enum class IntensityKind { gamma, brightness, contrast, lowres };

std::string_view to_string(PerturbationKind kind);
std::string_view to_string(DeleteTarget target);
std::string_view to_string(IntensityKind kind);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Widened augmentation ranges used by the intensity perturbation. These are
// configuration defaults, not measured values.
struct IntensityRanges {
  Interval gamma{0.5, 2.0};
  Interval brightness{-0.3, 0.3};  // fraction of the slice intensity range
  Interval contrast{0.5, 1.5};
  std::vector<int> lowres_factors{2, 3, 4};
};

struct PerturbationConfig {
  double p_delete_class = 0.10;
  double p_nullify = 0.10;
  double p_false_scar = 0.10;
  double p_false_mvo = 0.02;
  double p_intensity = 0.10;
  double scar_percentile = 85.0;
  int mvo_neighbor_radius_px = 1;
  bool nullify_whole_volume = false;
  IntensityRanges intensity_ranges;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabelChange {
  int x = 0;
  int y = 0;
  int z = 0;
  std::uint8_t before = 0;
  std::uint8_t after = 0;
  friend bool operator==(const LabelChange&, const LabelChange&) = default;
};

struct PerturbationEvent {
  PerturbationKind kind = PerturbationKind::delete_class;
  int slice_index = -1;         // -1: whole volume
  std::string affected;         // e.g. "scar", "scar+mvo", "all", "image"
  bool no_op = false;
  std::vector<LabelChange> changes;
  std::optional<IntensityKind> intensity_kind;
  double amount = 0.0;
  friend bool operator==(const PerturbationEvent&, const PerturbationEvent&) = default;
};

struct PerturbationLog {
  std::vector<PerturbationEvent> events;
  friend bool operator==(const PerturbationLog&, const PerturbationLog&) = default;
};

nlohmann::json to_json(const PerturbationLog& log);
PerturbationLog log_from_json(const nlohmann::json& j);

// Nearest-rank percentile: element at ceil(p/100 * n) - 1 of the sorted
// values, clamped to the valid index range.
double percentile(std::span<const double> values, double p);

// Relabels the target class(es) on the slice to remote myocardium.
Mask2D delete_class(const Mask2D& labels, DeleteTarget target);
MaskVolume delete_class_slice(const MaskVolume& volume, DeleteTarget target, int slice);

MaskVolume nullify_mask(const MaskVolume& volume, int slice);

// Relabels as scar the largest 8-connected component of myocardium pixels at
// or above the p-th percentile of myocardial intensity.
Mask2D add_false_scar(const Image2D& image, const Mask2D& labels, double percentile_p = 85.0);

// Relabels `seed` (a scar pixel) and every scar pixel within Chebyshev
// distance `radius_px` of it as MVO.
Mask2D add_false_mvo_at(const Mask2D& labels, Pixel seed, int radius_px = 1);
// Same, seeded at a scar pixel drawn uniformly with `rng`. Returns the input
// unchanged when the slice has no scar.
Mask2D add_false_mvo(const Mask2D& labels, Rng& rng, int radius_px = 1);

// Deterministic intensity transform; `amount` is gamma, brightness fraction,
// contrast factor, or integer downsampling factor depending on `kind`.
Image2D intensity_transform(const Image2D& image, IntensityKind kind, double amount);

struct PerturbationResult {
  MaskVolume volume;
  PerturbationLog log;
};

// One Bernoulli draw per kind, in the order delete_class, nullify,
// false_scar, false_mvo, intensity; each applied kind targets one uniformly
// drawn slice.
PerturbationResult apply_perturbations(const MaskVolume& volume, const PerturbationConfig& config);

// Re-applies a log to the unperturbed input.
MaskVolume replay_log(const MaskVolume& original, const PerturbationLog& log);

}  // namespace lge
