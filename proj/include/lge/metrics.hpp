#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lge/volume.hpp"

namespace lge {

// Dice similarity 2|P∩G| / (|P|+|G|) over binary masks; 1 when both are empty.
double dice(std::span<const std::uint8_t> prediction, std::span<const std::uint8_t> truth);
double dice(const MaskVolume& prediction, const MaskVolume& truth, ClassSet classes);

// Absolute volume difference in ml.
double avd(std::size_t prediction_count, std::size_t truth_count, const Spacing& spacing);
double avd(const MaskVolume& prediction, const MaskVolume& truth, ClassSet classes);

// AVD relative to myocardial volume. Throws when v_myo_ml <= 0.
double avdr(double avd_ml, double v_myo_ml);

// 100 * |infarct| / |myocardium|. Throws on empty myocardium.
double infarct_fraction(const MaskVolume& volume, ClassSet infarct_classes = kInfarct,
                        ClassSet myo_classes = kMyocardium);

bool patient_detection(const MaskVolume& volume, ClassSet classes);

struct Contingency {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  std::optional<double> sensitivity() const;
  std::optional<double> specificity() const;
  friend bool operator==(const Contingency&, const Contingency&) = default;
};

Contingency contingency(std::span<const bool> predictions, std::span<const bool> truths);

struct ProportionCI {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Exact (Clopper-Pearson) two-sided interval for k successes out of n.
ProportionCI clopper_pearson(std::uint64_t k, std::uint64_t n, double level = 0.95);

// Undefined estimates (zero denominator) are nullopt and render as "-".
struct DiagnosticPerformance {
  std::optional<ProportionCI> sensitivity;
  std::optional<ProportionCI> specificity;
};

DiagnosticPerformance sens_spec_ci(const Contingency& table, double level = 0.95);

// "98.7% [95.3, 99.8]" or "-".
std::string format_percent_ci(const std::optional<ProportionCI>& value);

struct MetricRow {
  std::string patient_id;
  std::string class_name;
  double dice = 0.0;
  double avd_ml = 0.0;
  double avdr = 0.0;
  double infarct_pct_pred = 0.0;
  double infarct_pct_gt = 0.0;
};

struct EvalClass {
  std::string name;
  ClassSet classes;
};

// Classes reported by `eval`: myocardium, scar, mvo, and total infarct.
std::vector<EvalClass> default_eval_classes();

// One row per class. infarct_pct_* is the class volume as a percentage of
// the respective myocardium; AVDR uses the reference myocardial volume.
// Ratios with an empty myocardium are NaN.
std::vector<MetricRow> evaluate_pair(const MaskVolume& prediction, const MaskVolume& truth,
                                     const std::vector<EvalClass>& classes,
                                     ClassSet myo_classes = kMyocardium);

}  // namespace lge
