#include "lge/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace lge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

}  // namespace

bool AngleRange::contains(double angle) const {
  const double s = span();
  if (s <= 0.0) return false;
  if (s >= kTwoPi) return true;
  return wrap_angle(angle - start) < s;
}

void PhantomSpec::validate() const {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) {
    throw ValidationError("phantom dims must be positive");
  }
  spacing.validate();
  if (!(inner_radius_px > 0 && inner_radius_px < outer_radius_px)) {
    throw ValidationError("phantom radii must satisfy 0 < inner < outer");
  }
  if (!(noise_sd >= 0)) throw ValidationError("noise_sd must be non-negative");
  if (scar.angles.span() < 0 || scar.angles.span() > kTwoPi) {
    throw ValidationError("scar wedge must span between 0 and 2*pi");
  }
  if (!mvo) return;

  const MvoCore& core = *mvo;
  const double offset = scar.angles.span() >= kTwoPi
                            ? 0.0
                            : wrap_angle(core.angles.start - scar.angles.start);
  const bool angles_inside = core.angles.span() >= 0 &&
                             offset + core.angles.span() <= scar.angles.span() + 1e-12;
  const bool band_inside = core.inner_radius_px >= inner_radius_px &&
                           core.outer_radius_px <= outer_radius_px &&
                           core.inner_radius_px <= core.outer_radius_px;
  const bool slices_inside = core.slices.empty() || (core.slices.begin >= scar.slices.begin &&
                                                     core.slices.end <= scar.slices.end);
  if (!angles_inside || !band_inside || !slices_inside) {
    throw ValidationError("mvo core must lie inside the scar wedge");
  }
}

ClassId phantom_class_at(const PhantomSpec& spec, int x, int y, int z) {
  const double dx = x - spec.center_x;
  const double dy = y - spec.center_y;
  const double r = std::hypot(dx, dy);
  if (r < spec.inner_radius_px) return ClassId::bloodpool;
  if (r >= spec.outer_radius_px) return ClassId::background;

  const double angle = std::atan2(dy, dx);
  if (spec.mvo && spec.mvo->slices.contains(z) && spec.mvo->angles.contains(angle) &&
      r >= spec.mvo->inner_radius_px && r < spec.mvo->outer_radius_px) {
    return ClassId::mvo;
  }
  if (spec.scar.slices.contains(z) && spec.scar.angles.contains(angle)) return ClassId::scar;
  return ClassId::remote_myocardium;
}

Phantom make_phantom(const PhantomSpec& spec) {
  spec.validate();
  Phantom out;
  MaskVolume& v = out.volume;
  v = MaskVolume::zeros(spec.dims, spec.spacing);
  v.patient_id = spec.patient_id;
  v.series_id = spec.series_id;

  const std::array<float, kClassCount> base = {
      spec.intensities.background, spec.intensities.blood, spec.intensities.remote,
      spec.intensities.scar, spec.intensities.mvo};

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sd > 0 ? spec.noise_sd : 1.0);

  for (int z = 0; z < spec.dims.nz; ++z) {
    for (int y = 0; y < spec.dims.ny; ++y) {
      for (int x = 0; x < spec.dims.nx; ++x) {
        const ClassId c = phantom_class_at(spec, x, y, z);
        const std::size_t i = v.index(x, y, z);
        v.labels[i] = code_of(c);
        double value = base[code_of(c)];
        if (spec.noise_sd > 0) value += noise(rng);
        v.image[i] = static_cast<float>(value);
        ++out.truth.voxel_counts[code_of(c)];
      }
    }
  }
  for (int c = 0; c < kClassCount; ++c) {
    out.truth.volumes_ml[c] =
        static_cast<double>(out.truth.voxel_counts[c]) * spec.spacing.voxel_volume_mm3() / 1000.0;
  }
  return out;
}

}  // namespace lge
