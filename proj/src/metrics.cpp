#include "lge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

namespace lge {

namespace {

void require_same_grid(const MaskVolume& a, const MaskVolume& b) {
  if (a.dims != b.dims) throw ValidationError("prediction and reference dims differ");
}

}  // namespace

double dice(std::span<const std::uint8_t> prediction, std::span<const std::uint8_t> truth) {
  if (prediction.size() != truth.size()) throw ValidationError("dice: mask sizes differ");
  std::size_t p = 0, g = 0, both = 0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const bool in_p = prediction[i] != 0;
    const bool in_g = truth[i] != 0;
    p += in_p;
    g += in_g;
    both += in_p && in_g;
  }
  if (p + g == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + g);
}

double dice(const MaskVolume& prediction, const MaskVolume& truth, ClassSet classes) {
  require_same_grid(prediction, truth);
  return dice(class_mask(prediction, classes), class_mask(truth, classes));
}

double avd(std::size_t prediction_count, std::size_t truth_count, const Spacing& spacing) {
  const std::size_t diff = prediction_count > truth_count ? prediction_count - truth_count
                                                          : truth_count - prediction_count;
  return static_cast<double>(diff) * spacing.voxel_volume_mm3() / 1000.0;
}

double avd(const MaskVolume& prediction, const MaskVolume& truth, ClassSet classes) {
  require_same_grid(prediction, truth);
  return avd(count_voxels(prediction, classes), count_voxels(truth, classes), truth.spacing);
}

double avdr(double avd_ml, double v_myo_ml) {
  if (!(v_myo_ml > 0.0)) throw ValidationError("avdr: myocardial volume must be positive");
  return avd_ml / v_myo_ml;
}

double infarct_fraction(const MaskVolume& volume, ClassSet infarct_classes,
                        ClassSet myo_classes) {
  const std::size_t myo = count_voxels(volume, myo_classes);
  if (myo == 0) throw ValidationError("infarct_fraction: empty myocardium");
  return 100.0 * static_cast<double>(count_voxels(volume, infarct_classes)) /
         static_cast<double>(myo);
}

bool patient_detection(const MaskVolume& volume, ClassSet classes) {
  return std::any_of(volume.labels.begin(), volume.labels.end(),
                     [classes](std::uint8_t l) { return classes.contains(l); });
}

std::optional<double> Contingency::sensitivity() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> Contingency::specificity() const {
  if (tn + fp == 0) return std::nullopt;
  return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

Contingency contingency(std::span<const bool> predictions, std::span<const bool> truths) {
  if (predictions.size() != truths.size()) {
    throw ValidationError("contingency: prediction and truth lengths differ");
  }
  Contingency t;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] && truths[i]) ++t.tp;
    else if (predictions[i]) ++t.fp;
    else if (truths[i]) ++t.fn;
    else ++t.tn;
  }
  return t;
}

ProportionCI clopper_pearson(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0) throw ValidationError("clopper_pearson: zero trials");
  if (k > n) throw ValidationError("clopper_pearson: successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  const double alpha = 1.0 - level;
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  ProportionCI ci;
  ci.estimate = kd / nd;
  ci.lower = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
  ci.upper = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
  return ci;
}

DiagnosticPerformance sens_spec_ci(const Contingency& table, double level) {
  DiagnosticPerformance out;
  if (table.tp + table.fn > 0) out.sensitivity = clopper_pearson(table.tp, table.tp + table.fn, level);
  if (table.tn + table.fp > 0) out.specificity = clopper_pearson(table.tn, table.tn + table.fp, level);
  return out;
}

std::string format_percent_ci(const std::optional<ProportionCI>& value) {
  if (!value) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%% [%.1f, %.1f]", 100.0 * value->estimate,
                100.0 * value->lower, 100.0 * value->upper);
  return buf;
}

std::vector<EvalClass> default_eval_classes() {
  return {{"myocardium", kMyocardium},
          {"scar", ClassSet{ClassId::scar}},
          {"mvo", ClassSet{ClassId::mvo}},
          {"infarct", kInfarct}};
}

std::vector<MetricRow> evaluate_pair(const MaskVolume& prediction, const MaskVolume& truth,
                                     const std::vector<EvalClass>& classes,
                                     ClassSet myo_classes) {
  require_same_grid(prediction, truth);
  const std::size_t myo_pred = count_voxels(prediction, myo_classes);
  const std::size_t myo_gt = count_voxels(truth, myo_classes);
  const double v_myo = class_volume_ml(truth, myo_classes);
  constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

  std::vector<MetricRow> rows;
  for (const auto& c : classes) {
    MetricRow row;
    row.patient_id = truth.patient_id;
    row.class_name = c.name;
    const auto p = class_mask(prediction, c.classes);
    const auto g = class_mask(truth, c.classes);
    row.dice = dice(p, g);
    const auto np = static_cast<std::size_t>(std::count(p.begin(), p.end(), 1));
    const auto ng = static_cast<std::size_t>(std::count(g.begin(), g.end(), 1));
    row.avd_ml = avd(np, ng, truth.spacing);
    row.avdr = v_myo > 0.0 ? avdr(row.avd_ml, v_myo) : kUndefined;
    row.infarct_pct_pred = myo_pred > 0 ? 100.0 * static_cast<double>(np) / myo_pred : kUndefined;
    row.infarct_pct_gt = myo_gt > 0 ? 100.0 * static_cast<double>(ng) / myo_gt : kUndefined;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lge
