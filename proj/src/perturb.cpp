#include "lge/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "lge/components.hpp"

namespace lge {

namespace {

constexpr std::uint8_t kBackground = code_of(ClassId::background);
constexpr std::uint8_t kRemote = code_of(ClassId::remote_myocardium);
constexpr std::uint8_t kScar = code_of(ClassId::scar);
constexpr std::uint8_t kMvo = code_of(ClassId::mvo);

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

template <typename E, std::size_t N>
E enum_from_string(std::string_view text, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  throw ValidationError("unknown enum value: " + std::string(text));
}

constexpr std::array<std::string_view, 5> kKindNames = {"delete_class", "nullify", "false_scar",
                                                        "false_mvo", "intensity"};
constexpr std::array<std::string_view, 3> kTargetNames = {"scar", "mvo", "scar+mvo"};
constexpr std::array<std::string_view, 4> kIntensityNames = {"gamma", "brightness", "contrast",
                                                             "lowres"};

// Records per-pixel label differences of slice z.
void diff_slice(const Mask2D& before, const Mask2D& after, int z,
                std::vector<LabelChange>& changes) {
  for (int y = 0; y < before.height(); ++y) {
    for (int x = 0; x < before.width(); ++x) {
      if (before(x, y) != after(x, y)) changes.push_back({x, y, z, before(x, y), after(x, y)});
    }
  }
}

int draw_slice(Rng& rng, int nz) {
  return std::uniform_int_distribution<int>(0, nz - 1)(rng);
}

}  // namespace

std::string_view to_string(PerturbationKind kind) { return kKindNames.at(static_cast<int>(kind)); }
std::string_view to_string(DeleteTarget target) { return kTargetNames.at(static_cast<int>(target)); }
std::string_view to_string(IntensityKind kind) { return kIntensityNames.at(static_cast<int>(kind)); }

void PerturbationConfig::validate() const {
  for (double p : {p_delete_class, p_nullify, p_false_scar, p_false_mvo, p_intensity}) {
    if (!is_probability(p)) throw ValidationError("perturbation probabilities must lie in [0,1]");
  }
  if (!(scar_percentile > 0.0 && scar_percentile < 100.0)) {
    throw ValidationError("scar_percentile must lie in (0,100)");
  }
  if (mvo_neighbor_radius_px < 0) throw ValidationError("mvo neighbour radius must be >= 0");
  const auto& r = intensity_ranges;
  if (r.gamma.lo <= 0.0 || r.gamma.hi < r.gamma.lo || r.brightness.hi < r.brightness.lo ||
      r.contrast.hi < r.contrast.lo || r.lowres_factors.empty()) {
    throw ValidationError("invalid intensity ranges");
  }
  for (int f : r.lowres_factors) {
    if (f < 1) throw ValidationError("lowres factors must be >= 1");
  }
}

nlohmann::json to_json(const PerturbationLog& log) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : log.events) {
    nlohmann::json j;
    j["kind"] = to_string(e.kind);
    j["slice"] = e.slice_index;
    j["affected"] = e.affected;
    j["no_op"] = e.no_op;
    if (e.intensity_kind) {
      j["intensity_kind"] = to_string(*e.intensity_kind);
      j["amount"] = e.amount;
    }
    nlohmann::json changes = nlohmann::json::array();
    for (const auto& c : e.changes) changes.push_back({c.x, c.y, c.z, c.before, c.after});
    j["changes"] = std::move(changes);
    events.push_back(std::move(j));
  }
  return {{"events", std::move(events)}};
}

PerturbationLog log_from_json(const nlohmann::json& j) {
  PerturbationLog log;
  try {
    for (const auto& je : j.at("events")) {
      PerturbationEvent e;
      e.kind = enum_from_string<PerturbationKind>(je.at("kind").get<std::string>(), kKindNames);
      e.slice_index = je.at("slice").get<int>();
      e.affected = je.at("affected").get<std::string>();
      e.no_op = je.at("no_op").get<bool>();
      if (je.contains("intensity_kind")) {
        e.intensity_kind = enum_from_string<IntensityKind>(
            je.at("intensity_kind").get<std::string>(), kIntensityNames);
        e.amount = je.at("amount").get<double>();
      }
      for (const auto& c : je.at("changes")) {
        e.changes.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>(),
                             c.at(3).get<std::uint8_t>(), c.at(4).get<std::uint8_t>()});
      }
      log.events.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed perturbation log: ") + ex.what());
  }
  return log;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<long long>(sorted.size());
  long long rank = static_cast<long long>(std::ceil(p / 100.0 * static_cast<double>(n))) - 1;
  rank = std::clamp(rank, 0LL, n - 1);
  return sorted[static_cast<std::size_t>(rank)];
}

Mask2D delete_class(const Mask2D& labels, DeleteTarget target) {
  Mask2D out = labels;
  for (auto& l : out.data()) {
    const bool hit = (l == kScar && target != DeleteTarget::mvo) ||
                     (l == kMvo && target != DeleteTarget::scar);
    if (hit) l = kRemote;
  }
  return out;
}

MaskVolume delete_class_slice(const MaskVolume& volume, DeleteTarget target, int slice) {
  if (slice < 0 || slice >= volume.dims.nz) throw ValidationError("slice index out of range");
  MaskVolume out = volume;
  out.set_label_slice(slice, delete_class(volume.label_slice(slice), target));
  return out;
}

MaskVolume nullify_mask(const MaskVolume& volume, int slice) {
  if (slice < 0 || slice >= volume.dims.nz) throw ValidationError("slice index out of range");
  MaskVolume out = volume;
  out.set_label_slice(slice, Mask2D(volume.dims.nx, volume.dims.ny, kBackground));
  return out;
}

Mask2D add_false_scar(const Image2D& image, const Mask2D& labels, double percentile_p) {
  if (image.width() != labels.width() || image.height() != labels.height()) {
    throw ValidationError("image and labels differ in size");
  }
  std::vector<double> myo_values;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (kMyocardium.contains(labels.data()[i])) myo_values.push_back(image.data()[i]);
  }
  if (myo_values.empty()) throw ValidationError("slice has no myocardium");
  const double t = percentile(myo_values, percentile_p);

  Mask2D candidates(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    candidates.data()[i] =
        (kMyocardium.contains(labels.data()[i]) && image.data()[i] >= t) ? 1 : 0;
  }
  const Components cc = connected_components(candidates, Connectivity::eight);
  const int keep = cc.largest();
  Mask2D out = labels;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (keep != 0 && cc.labels.data()[i] == keep) out.data()[i] = kScar;
  }
  return out;
}

Mask2D add_false_mvo_at(const Mask2D& labels, Pixel seed, int radius_px) {
  if (!labels.contains(seed.x, seed.y) || labels(seed.x, seed.y) != kScar) {
    throw ValidationError("false MVO seed must be a scar pixel");
  }
  Mask2D out = labels;
  for (int y = seed.y - radius_px; y <= seed.y + radius_px; ++y) {
    for (int x = seed.x - radius_px; x <= seed.x + radius_px; ++x) {
      if (labels.contains(x, y) && labels(x, y) == kScar) out(x, y) = kMvo;
    }
  }
  return out;
}

Mask2D add_false_mvo(const Mask2D& labels, Rng& rng, int radius_px) {
  std::vector<Pixel> scar;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (labels(x, y) == kScar) scar.push_back({x, y});
  if (scar.empty()) return labels;
  const auto pick = std::uniform_int_distribution<std::size_t>(0, scar.size() - 1)(rng);
  return add_false_mvo_at(labels, scar[pick], radius_px);
}

Image2D intensity_transform(const Image2D& image, IntensityKind kind, double amount) {
  if (image.empty()) return image;
  const auto [min_it, max_it] = std::minmax_element(image.data().begin(), image.data().end());
  const double lo = *min_it;
  const double range = static_cast<double>(*max_it) - lo;
  Image2D out = image;

  switch (kind) {
    case IntensityKind::gamma:
      if (range <= 0.0) return out;
      for (auto& v : out.data()) {
        const double u = (v - lo) / range;
        v = static_cast<float>(lo + range * std::pow(u, amount));
      }
      break;
    case IntensityKind::brightness:
      if (range <= 0.0) return out;
      for (auto& v : out.data()) v = static_cast<float>(v + amount * range);
      break;
    case IntensityKind::contrast: {
      double sum = 0.0;
      for (float v : image.data()) sum += v;
      const double mean = sum / static_cast<double>(image.size());
      for (auto& v : out.data()) v = static_cast<float>(mean + amount * (v - mean));
      break;
    }
    case IntensityKind::lowres: {
      const int f = static_cast<int>(std::lround(amount));
      if (f < 1) throw ValidationError("lowres factor must be >= 1");
      if (f == 1) return out;
      for (int by = 0; by < image.height(); by += f) {
        for (int bx = 0; bx < image.width(); bx += f) {
          const int ex = std::min(bx + f, image.width());
          const int ey = std::min(by + f, image.height());
          double sum = 0.0;
          for (int y = by; y < ey; ++y)
            for (int x = bx; x < ex; ++x) sum += image(x, y);
          const auto mean = static_cast<float>(sum / ((ex - bx) * (ey - by)));
          for (int y = by; y < ey; ++y)
            for (int x = bx; x < ex; ++x) out(x, y) = mean;
        }
      }
      break;
    }
  }
  return out;
}

PerturbationResult apply_perturbations(const MaskVolume& volume,
                                       const PerturbationConfig& config) {
  config.validate();
  volume.validate();
  PerturbationResult result{volume, {}};
  MaskVolume& v = result.volume;
  const int nz = v.dims.nz;
  Rng rng(config.seed);
  auto bernoulli = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };

  auto record_slice = [&](PerturbationKind kind, int z, std::string affected,
                          const Mask2D& after) {
    PerturbationEvent e;
    e.kind = kind;
    e.slice_index = z;
    e.affected = std::move(affected);
    diff_slice(v.label_slice(z), after, z, e.changes);
    e.no_op = e.changes.empty();
    v.set_label_slice(z, after);
    result.log.events.push_back(std::move(e));
  };

  if (bernoulli(config.p_delete_class)) {
    const int z = draw_slice(rng, nz);
    const auto target = static_cast<DeleteTarget>(std::uniform_int_distribution<int>(0, 2)(rng));
    record_slice(PerturbationKind::delete_class, z, std::string(to_string(target)),
                 delete_class(v.label_slice(z), target));
  }

  if (bernoulli(config.p_nullify)) {
    if (config.nullify_whole_volume) {
      PerturbationEvent e;
      e.kind = PerturbationKind::nullify;
      e.slice_index = -1;
      e.affected = "all";
      const Mask2D zero(v.dims.nx, v.dims.ny, kBackground);
      for (int z = 0; z < nz; ++z) {
        diff_slice(v.label_slice(z), zero, z, e.changes);
        v.set_label_slice(z, zero);
      }
      e.no_op = e.changes.empty();
      result.log.events.push_back(std::move(e));
    } else {
      const int z = draw_slice(rng, nz);
      record_slice(PerturbationKind::nullify, z, "all",
                   Mask2D(v.dims.nx, v.dims.ny, kBackground));
    }
  }

  if (bernoulli(config.p_false_scar)) {
    const int z = draw_slice(rng, nz);
    const Mask2D labels = v.label_slice(z);
    const bool has_myo = std::any_of(labels.data().begin(), labels.data().end(),
                                     [](std::uint8_t l) { return kMyocardium.contains(l); });
    record_slice(PerturbationKind::false_scar, z, "scar",
                 has_myo ? add_false_scar(v.image_slice(z), labels, config.scar_percentile)
                         : labels);
  }

  if (bernoulli(config.p_false_mvo)) {
    const int z = draw_slice(rng, nz);
    record_slice(PerturbationKind::false_mvo, z, "mvo",
                 add_false_mvo(v.label_slice(z), rng, config.mvo_neighbor_radius_px));
  }

  if (bernoulli(config.p_intensity)) {
    const int z = draw_slice(rng, nz);
    const auto& ranges = config.intensity_ranges;
    const auto kind = static_cast<IntensityKind>(std::uniform_int_distribution<int>(0, 3)(rng));
    double amount = 0.0;
    auto uniform = [&rng](Interval r) {
      return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    };
    switch (kind) {
      case IntensityKind::gamma: amount = uniform(ranges.gamma); break;
      case IntensityKind::brightness: amount = uniform(ranges.brightness); break;
      case IntensityKind::contrast: amount = uniform(ranges.contrast); break;
      case IntensityKind::lowres:
        amount = ranges.lowres_factors[std::uniform_int_distribution<std::size_t>(
            0, ranges.lowres_factors.size() - 1)(rng)];
        break;
    }
    PerturbationEvent e;
    e.kind = PerturbationKind::intensity;
    e.slice_index = z;
    e.affected = "image";
    e.intensity_kind = kind;
    e.amount = amount;
    v.set_image_slice(z, intensity_transform(v.image_slice(z), kind, amount));
    result.log.events.push_back(std::move(e));
  }

  return result;
}

MaskVolume replay_log(const MaskVolume& original, const PerturbationLog& log) {
  MaskVolume v = original;
  for (const auto& e : log.events) {
    for (const auto& c : e.changes) {
      if (c.x < 0 || c.y < 0 || c.z < 0 || c.x >= v.dims.nx || c.y >= v.dims.ny ||
          c.z >= v.dims.nz) {
        throw ValidationError("log change outside the volume");
      }
      std::uint8_t& label = v.labels[v.index(c.x, c.y, c.z)];
      if (label != c.before) throw ValidationError("log does not match the replay input");
      label = c.after;
    }
    if (e.kind == PerturbationKind::intensity && e.intensity_kind) {
      v.set_image_slice(e.slice_index,
                        intensity_transform(v.image_slice(e.slice_index), *e.intensity_kind,
                                            e.amount));
    }
  }
  return v;
}

}  // namespace lge
