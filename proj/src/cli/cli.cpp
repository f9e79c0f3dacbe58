#include "lge/cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "lge/csv.hpp"
#include "lge/error.hpp"
#include "lge/metrics.hpp"
#include "lge/perturb.hpp"
#include "lge/phantom.hpp"
#include "lge/rating/server.hpp"
#include "lge/roi.hpp"
#include "lge/seg5sd.hpp"
#include "lge/stats.hpp"
#include "lge/volume.hpp"

namespace lge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string number_text(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Non-finite values become JSON null.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

void require_count(const std::vector<double>& values, std::size_t n, const char* flag) {
  if (values.size() != n) {
    throw ValidationError(std::string(flag) + " expects " + std::to_string(n) +
                          " comma-separated values");
  }
}

int as_int(double v, const char* what) {
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ValidationError(std::string(what) + " must be an integer");
  }
  return static_cast<int>(v);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

void add_config(CLI::App* cmd) {
  // Consumed by expand_config before parsing; registered for --help only.
  cmd->add_option("--config", "JSON file whose keys mirror the long flags");
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Replaces "--config FILE" with the flags it lists. Flags given explicitly on
// the command line take precedence over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;

  std::ifstream f(path);
  if (!f) throw IoError("cannot read config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (has_flag(out, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + text(v);
      out.push_back(flag);
      out.push_back(joined);
    } else if (!value.is_null()) {
      out.push_back(flag);
      out.push_back(text(value));
    }
  }
  return out;
}

json ground_truth_json(const GroundTruth& t) {
  json counts = json::object();
  json volumes = json::object();
  for (int c = 0; c < kClassCount; ++c) {
    const std::string name(class_name(static_cast<ClassId>(c)));
    counts[name] = t.voxel_counts[c];
    volumes[name] = t.volumes_ml[c];
  }
  return {{"voxel_counts", counts}, {"volumes_ml", volumes}};
}

// ---- phantom ---------------------------------------------------------------

struct PhantomArgs {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<double> dims{64, 64, 8};
  std::vector<double> spacing{2.2, 1.6, 8.0, 2.0};
  std::vector<double> radii{10, 16};
  std::vector<double> center;
  std::vector<double> scar_angles{0.0, std::numbers::pi / 3.0};
  std::vector<double> scar_slices;
  std::vector<double> mvo_angles;
  std::vector<double> mvo_radii;
  std::vector<double> mvo_slices;
  std::vector<double> intensities{0, 60, 100, 200, 90};
  double noise_sd = 0.0;
  std::string patient_id = "phantom";
};

void register_phantom(CLI::App& app, PhantomArgs& a) {
  auto* cmd = app.add_subcommand("phantom", "Generate a synthetic LV phantom volume");
  add_config(cmd);
  cmd->add_option("--out", a.out_dir, "Output volume directory")->required();
  cmd->add_option("--seed", a.seed, "Noise seed (required)");
  cmd->add_option("--dims", a.dims, "nx,ny,nz")->delimiter(',')->capture_default_str();
  cmd->add_option("--spacing", a.spacing, "dx,dy,slice_thickness,interslice_gap (mm)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--radii", a.radii, "Inner,outer myocardial radius in pixels")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--center", a.center, "cx,cy in pixels (default: image centre)")
      ->delimiter(',');
  cmd->add_option("--scar-angles", a.scar_angles, "Scar wedge start,end in radians")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--scar-slices", a.scar_slices, "Scar slice range begin,end (default: all)")
      ->delimiter(',');
  cmd->add_option("--mvo-angles", a.mvo_angles, "MVO core start,end in radians (enables MVO)")
      ->delimiter(',');
  cmd->add_option("--mvo-radii", a.mvo_radii, "MVO radial band inner,outer in pixels")
      ->delimiter(',');
  cmd->add_option("--mvo-slices", a.mvo_slices, "MVO slice range begin,end")->delimiter(',');
  cmd->add_option("--intensities", a.intensities, "background,blood,remote,scar,mvo")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--noise-sd", a.noise_sd, "Gaussian noise SD")->capture_default_str();
  cmd->add_option("--patient-id", a.patient_id, "Patient id stored in meta.json")
      ->capture_default_str();
}

int run_phantom(const PhantomArgs& a, std::ostream& out) {
  if (!a.seed) throw ValidationError("phantom requires --seed");
  require_count(a.dims, 3, "--dims");
  require_count(a.spacing, 4, "--spacing");
  require_count(a.radii, 2, "--radii");
  require_count(a.scar_angles, 2, "--scar-angles");
  require_count(a.intensities, 5, "--intensities");

  PhantomSpec spec;
  spec.dims = {as_int(a.dims[0], "--dims"), as_int(a.dims[1], "--dims"),
               as_int(a.dims[2], "--dims")};
  spec.spacing = {a.spacing[0], a.spacing[1], a.spacing[2], a.spacing[3]};
  spec.inner_radius_px = a.radii[0];
  spec.outer_radius_px = a.radii[1];
  if (a.center.empty()) {
    spec.center_x = spec.dims.nx / 2.0;
    spec.center_y = spec.dims.ny / 2.0;
  } else {
    require_count(a.center, 2, "--center");
    spec.center_x = a.center[0];
    spec.center_y = a.center[1];
  }
  spec.scar.angles = {a.scar_angles[0], a.scar_angles[1]};
  if (a.scar_slices.empty()) {
    spec.scar.slices = {0, spec.dims.nz};
  } else {
    require_count(a.scar_slices, 2, "--scar-slices");
    spec.scar.slices = {as_int(a.scar_slices[0], "--scar-slices"),
                        as_int(a.scar_slices[1], "--scar-slices")};
  }
  if (!a.mvo_angles.empty()) {
    require_count(a.mvo_angles, 2, "--mvo-angles");
    require_count(a.mvo_radii, 2, "--mvo-radii");
    MvoCore core;
    core.angles = {a.mvo_angles[0], a.mvo_angles[1]};
    core.inner_radius_px = a.mvo_radii[0];
    core.outer_radius_px = a.mvo_radii[1];
    if (a.mvo_slices.empty()) {
      core.slices = spec.scar.slices;
    } else {
      require_count(a.mvo_slices, 2, "--mvo-slices");
      core.slices = {as_int(a.mvo_slices[0], "--mvo-slices"),
                     as_int(a.mvo_slices[1], "--mvo-slices")};
    }
    spec.mvo = core;
  } else if (!a.mvo_radii.empty() || !a.mvo_slices.empty()) {
    throw ValidationError("--mvo-radii/--mvo-slices need --mvo-angles");
  }
  const auto& iv = a.intensities;
  spec.intensities = {static_cast<float>(iv[0]), static_cast<float>(iv[1]),
                      static_cast<float>(iv[2]), static_cast<float>(iv[3]),
                      static_cast<float>(iv[4])};
  spec.noise_sd = a.noise_sd;
  spec.seed = *a.seed;
  spec.patient_id = a.patient_id;

  const Phantom phantom = make_phantom(spec);
  save_volume(phantom.volume, a.out_dir);
  const json truth = ground_truth_json(phantom.truth);
  write_text(fs::path(a.out_dir) / "ground_truth.json", truth.dump(2) + "\n");
  out << truth.dump(2) << "\n";
  return kExitOk;
}

// ---- roi -------------------------------------------------------------------

struct RoiArgs {
  std::string in_dir;
  std::string out_dir;
  std::vector<double> size{128, 128};
  std::string lv_mask;
  bool normalize = false;
};

void register_roi(CLI::App& app, RoiArgs& a) {
  auto* cmd = app.add_subcommand("roi", "Crop a volume around the left ventricle");
  add_config(cmd);
  cmd->add_option("--in", a.in_dir, "Input volume directory")->required();
  cmd->add_option("--out", a.out_dir, "Output volume directory")->required();
  cmd->add_option("--size", a.size, "Crop width,height")->delimiter(',')->capture_default_str();
  cmd->add_option("--lv-mask", a.lv_mask,
                  "Volume directory whose labels locate the LV (default: the input labels)");
  cmd->add_flag("--normalize", a.normalize, "Z-score the cropped image intensities");
}

int run_roi(const RoiArgs& a, std::ostream& out) {
  require_count(a.size, 2, "--size");
  const Size2 size{as_int(a.size[0], "--size"), as_int(a.size[1], "--size")};
  if (size.width < 1 || size.height < 1) throw ValidationError("--size must be positive");
  const MaskVolume volume = load_volume(a.in_dir);
  const MaskVolume mask_source = a.lv_mask.empty() ? volume : load_volume(a.lv_mask);
  if (mask_source.dims != volume.dims) throw ValidationError("--lv-mask dims differ from --in");
  const std::vector<std::uint8_t> lv = class_mask(mask_source, kLeftVentricle);

  const CropSpec crop = locate_roi(volume, lv, size);
  MaskVolume cropped = extract_roi_stack(volume, lv, size);
  if (a.normalize) {
    const std::vector<float> z = normalize(cropped.image);
    cropped.image = z;
  }
  save_volume(cropped, a.out_dir);
  out << json{{"center", {crop.center.x, crop.center.y}},
              {"x0", crop.x0()},
              {"y0", crop.y0()},
              {"size", {size.width, size.height}},
              {"normalized", a.normalize}}
             .dump(2)
      << "\n";
  return kExitOk;
}

// ---- seg5sd ----------------------------------------------------------------

struct Seg5sdArgs {
  std::string in_dir;
  std::string out_dir;
  std::string roi_file;
  double k = 5.0;
  double min_sd = 0.0;
  std::size_t min_component = 1;
};

void register_seg5sd(CLI::App& app, Seg5sdArgs& a) {
  auto* cmd = app.add_subcommand("seg5sd", "Mean + k*SD infarct thresholding baseline");
  add_config(cmd);
  cmd->add_option("--in", a.in_dir, "Input volume directory")->required();
  cmd->add_option("--out", a.out_dir, "Write the thresholded label volume here");
  cmd->add_option("--roi", a.roi_file,
                  "JSON {\"slice\": z, \"pixels\": [[x,y],...]} remote ROI "
                  "(default: remote myocardium of the richest slice)");
  cmd->add_option("--k", a.k, "SD multiplier")->capture_default_str();
  cmd->add_option("--min-sd", a.min_sd, "Floor applied to the ROI SD")->capture_default_str();
  cmd->add_option("--min-component", a.min_component, "Drop marked components below this size")
      ->capture_default_str();
}

RemoteRoi read_roi(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  try {
    const json j = json::parse(f);
    RemoteRoi roi;
    roi.slice_index = j.at("slice").get<int>();
    for (const auto& p : j.at("pixels")) {
      roi.pixels.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    }
    return roi;
  } catch (const json::exception& e) {
    throw ValidationError("malformed ROI file " + path + ": " + e.what());
  }
}

int run_seg5sd(const Seg5sdArgs& a, std::ostream& out, std::ostream& err) {
  const MaskVolume volume = load_volume(a.in_dir);
  const RemoteRoi roi = a.roi_file.empty() ? default_remote_roi(volume) : read_roi(a.roi_file);
  Seg5sdOptions options;
  options.k = a.k;
  options.min_sd = a.min_sd;
  options.min_component_px = a.min_component;
  const Seg5sdResult result = segment_5sd(volume, roi, options);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  if (!a.out_dir.empty()) {
    MaskVolume labelled = volume;
    for (int z = 0; z < volume.dims.nz; ++z) {
      Mask2D labels = volume.label_slice(z);
      const Mask2D& marked = result.scar_masks[static_cast<std::size_t>(z)];
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!kMyocardium.contains(labels.data()[i])) continue;
        labels.data()[i] = marked.data()[i] ? code_of(ClassId::scar)
                                            : code_of(ClassId::remote_myocardium);
      }
      labelled.set_label_slice(z, labels);
    }
    save_volume(labelled, a.out_dir);
  }
  const ThresholdReport& r = result.report;
  out << json{{"roi_slice", roi.slice_index},
              {"roi_pixels", roi.pixels.size()},
              {"mean", r.mean},
              {"sd", r.sd},
              {"k", r.k},
              {"threshold", r.threshold},
              {"per_slice_area_mm2", r.per_slice_area_mm2},
              {"total_volume_ml", r.total_volume_ml},
              {"warnings", result.warnings}}
             .dump(2)
      << "\n";
  return kExitOk;
}

// ---- perturb ---------------------------------------------------------------

struct PerturbArgs {
  std::string in_dir;
  std::string out_dir;
  std::string log_path;
  std::optional<std::uint64_t> seed;
  PerturbationConfig config;
};

void register_perturb(CLI::App& app, PerturbArgs& a) {
  auto* cmd = app.add_subcommand("perturb", "Apply stochastic label/intensity perturbations");
  add_config(cmd);
  PerturbationConfig& c = a.config;
  cmd->add_option("--in", a.in_dir, "Input volume directory")->required();
  cmd->add_option("--out", a.out_dir, "Output volume directory")->required();
  cmd->add_option("--log", a.log_path, "Perturbation log path (default: <out>/perturbation_log.json)");
  cmd->add_option("--seed", a.seed, "RNG seed (required)");
  cmd->add_option("--p-delete", c.p_delete_class, "Probability of deleting scar/MVO on a slice")
      ->capture_default_str();
  cmd->add_option("--p-nullify", c.p_nullify, "Probability of nullifying a slice mask")
      ->capture_default_str();
  cmd->add_option("--p-false-scar", c.p_false_scar, "Probability of adding false scar")
      ->capture_default_str();
  cmd->add_option("--p-false-mvo", c.p_false_mvo, "Probability of adding false MVO")
      ->capture_default_str();
  cmd->add_option("--p-intensity", c.p_intensity, "Probability of an intensity transform")
      ->capture_default_str();
  cmd->add_option("--scar-percentile", c.scar_percentile, "Myocardial intensity percentile")
      ->capture_default_str();
  cmd->add_option("--mvo-radius", c.mvo_neighbor_radius_px, "False MVO neighbourhood radius")
      ->capture_default_str();
  cmd->add_flag("--nullify-volume", c.nullify_whole_volume,
                "Nullify the whole volume instead of one slice");
}

int run_perturb(PerturbArgs a, std::ostream& out) {
  if (!a.seed) throw ValidationError("perturb requires --seed");
  a.config.seed = *a.seed;
  a.config.validate();
  const MaskVolume volume = load_volume(a.in_dir);
  const PerturbationResult result = apply_perturbations(volume, a.config);
  save_volume(result.volume, a.out_dir);
  const std::string log_text = to_json(result.log).dump(2) + "\n";
  const fs::path log_path =
      a.log_path.empty() ? fs::path(a.out_dir) / "perturbation_log.json" : fs::path(a.log_path);
  write_text(log_path, log_text);
  out << log_text;
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::string out_csv;
  std::string summary;
};

void register_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Per-patient Dice/AVD/AVDR/infarct% against references");
  add_config(cmd);
  cmd->add_option("--manifest", a.manifest, "CSV with patient_id,pred_path,gt_path")->required();
  cmd->add_option("--out", a.out_csv, "Metrics CSV output")->required();
  cmd->add_option("--summary", a.summary, "Summary JSON output (default: stdout)");
}

const std::vector<std::string> kMetricColumns = {
    "patient_id", "class", "dice", "avd_ml", "avdr", "infarct_pct_pred", "infarct_pct_gt"};

json mean_sd(const std::vector<double>& values) {
  std::vector<double> v;
  std::copy_if(values.begin(), values.end(), std::back_inserter(v),
               [](double x) { return std::isfinite(x); });
  if (v.empty()) return {{"n", 0}, {"mean", nullptr}, {"sd", nullptr}};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  json sd = nullptr;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return {{"n", v.size()}, {"mean", mean}, {"sd", sd}};
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const CsvTable manifest = read_csv(a.manifest);
  const std::size_t pid_col = manifest.column("patient_id");
  const std::size_t pred_col = manifest.column("pred_path");
  const std::size_t gt_col = manifest.column("gt_path");
  const fs::path base = fs::path(a.manifest).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  std::vector<std::string> seen;
  const auto classes = default_eval_classes();
  std::string csv = csv_line(kMetricColumns);
  std::map<std::string, std::map<std::string, std::vector<double>>> per_class;
  std::vector<bool> gt_scar, pred_scar, gt_mvo, pred_mvo;
  for (const auto& row : manifest.rows) {
    const std::string& pid = row[pid_col];
    if (std::find(seen.begin(), seen.end(), pid) != seen.end()) {
      throw ValidationError("duplicate patient_id in manifest: " + pid);
    }
    seen.push_back(pid);
    const MaskVolume pred = load_volume(resolve(row[pred_col]));
    const MaskVolume gt = load_volume(resolve(row[gt_col]));
    for (const MetricRow& m : evaluate_pair(pred, gt, classes)) {
      csv += csv_line({pid, m.class_name, number_text(m.dice), number_text(m.avd_ml),
                       number_text(m.avdr), number_text(m.infarct_pct_pred),
                       number_text(m.infarct_pct_gt)});
      auto& metrics = per_class[m.class_name];
      metrics["dice"].push_back(m.dice);
      metrics["avd_ml"].push_back(m.avd_ml);
      metrics["avdr"].push_back(m.avdr);
      metrics["infarct_pct_pred"].push_back(m.infarct_pct_pred);
      metrics["infarct_pct_gt"].push_back(m.infarct_pct_gt);
    }
    const ClassSet scar{ClassId::scar};
    const ClassSet mvo{ClassId::mvo};
    gt_scar.push_back(patient_detection(gt, scar));
    pred_scar.push_back(patient_detection(pred, scar));
    gt_mvo.push_back(patient_detection(gt, mvo));
    pred_mvo.push_back(patient_detection(pred, mvo));
  }
  write_text(a.out_csv, csv);

  json summary = {{"patients", seen.size()}, {"classes", json::object()}};
  for (const auto& ec : classes) {
    json entry = json::object();
    for (const auto& [metric, values] : per_class[ec.name]) entry[metric] = mean_sd(values);
    summary["classes"][ec.name] = entry;
  }
  auto detection = [](const std::vector<bool>& pred, const std::vector<bool>& truth) {
    const std::size_t n = pred.size();
    std::unique_ptr<bool[]> p(new bool[n]), t(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = pred[i];
      t[i] = truth[i];
    }
    const Contingency c = contingency({p.get(), n}, {t.get(), n});
    const DiagnosticPerformance perf = sens_spec_ci(c);
    return json{{"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"tn", c.tn},
                {"sensitivity", format_percent_ci(perf.sensitivity)},
                {"specificity", format_percent_ci(perf.specificity)}};
  };
  summary["patient_detection"] = {{"scar", detection(pred_scar, gt_scar)},
                                  {"mvo", detection(pred_mvo, gt_mvo)}};
  emit_json(summary, a.summary, out);
  return kExitOk;
}

// ---- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string in_csv;
  std::vector<std::string> pair;
  std::string class_filter;
  std::string out_json;
  std::string plot_prefix;
  std::string wilcoxon_mode = "auto";
  bool pratt = false;
};

void register_stats(CLI::App& app, StatsArgs& a) {
  auto* cmd = app.add_subcommand("stats", "Agreement statistics for two CSV columns");
  add_config(cmd);
  cmd->add_option("--in", a.in_csv, "Input CSV (e.g. the eval metrics)")->required();
  cmd->add_option("--pair", a.pair, "Reference column,comparison column")
      ->delimiter(',')
      ->required();
  cmd->add_option("--class", a.class_filter, "Keep only rows whose 'class' column matches");
  cmd->add_option("--out", a.out_json, "JSON report path (default: stdout)");
  cmd->add_option("--plot-data", a.plot_prefix,
                  "Write <prefix>_scatter.csv and <prefix>_bland_altman.csv point lists");
  cmd->add_option("--wilcoxon-mode", a.wilcoxon_mode, "auto, exact or normal")
      ->check(CLI::IsMember({"auto", "exact", "normal"}))
      ->capture_default_str();
  cmd->add_flag("--pratt", a.pratt, "Pratt handling of zero differences in the Wilcoxon test");
}

int run_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  if (a.pair.size() != 2) throw ValidationError("--pair expects exactly two column names");
  const CsvTable table = read_csv(a.in_csv);
  const std::size_t cx = table.column(a.pair[0]);
  const std::size_t cy = table.column(a.pair[1]);
  std::optional<std::size_t> cclass;
  if (!a.class_filter.empty()) cclass = table.column("class");

  PairedSeries series;
  std::size_t skipped = 0;
  for (const auto& row : table.rows) {
    if (cclass && row[*cclass] != a.class_filter) continue;
    const auto x = parse_number(row[cx]);
    const auto y = parse_number(row[cy]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      ++skipped;
      continue;
    }
    series.x.push_back(*x);
    series.y.push_back(*y);
  }
  if (skipped > 0) err << "skipped " << skipped << " rows with missing or non-finite values\n";
  series.validate(2);

  const ConcordanceResult ccc = lin_ccc(series);
  const BlandAltmanResult ba = bland_altman(series);
  const WilcoxonMode mode = a.wilcoxon_mode == "exact"    ? WilcoxonMode::exact
                            : a.wilcoxon_mode == "normal" ? WilcoxonMode::normal
                                                          : WilcoxonMode::automatic;
  const WilcoxonResult w = wilcoxon_signed_rank(
      series, mode, a.pratt ? ZeroHandling::pratt : ZeroHandling::wilcoxon);

  json report = {
      {"x", a.pair[0]},
      {"y", a.pair[1]},
      {"class", a.class_filter.empty() ? json(nullptr) : json(a.class_filter)},
      {"n", series.x.size()},
      {"skipped", skipped},
      {"ccc",
       {{"rho_c", number_json(ccc.rho_c)},
        {"pearson_r", number_json(ccc.pearson_r)},
        {"ci_lower", ccc.ci_lower ? json(*ccc.ci_lower) : json(nullptr)},
        {"ci_upper", ccc.ci_upper ? json(*ccc.ci_upper) : json(nullptr)}}},
      {"bland_altman",
       {{"bias", ba.bias}, {"sd_diff", ba.sd_diff}, {"loa_low", ba.loa_low},
        {"loa_high", ba.loa_high}}},
      {"wilcoxon",
       {{"w_plus", w.w_plus}, {"p_value", w.p_value}, {"n_used", w.n_used}, {"exact", w.exact}}}};

  if (!a.plot_prefix.empty()) {
    std::string scatter = csv_line({a.pair[0], a.pair[1]});
    std::string bland = csv_line({"mean", "difference"});
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      scatter += csv_line({number_text(series.x[i]), number_text(series.y[i])});
      bland += csv_line({number_text((series.x[i] + series.y[i]) / 2.0),
                         number_text(series.y[i] - series.x[i])});
    }
    write_text(a.plot_prefix + "_scatter.csv", scatter);
    write_text(a.plot_prefix + "_bland_altman.csv", bland);
  }
  emit_json(report, a.out_json, out);
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string data_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string admin_token;
};

void register_serve(CLI::App& app, ServeArgs& a) {
  auto* cmd = app.add_subcommand("serve", "Run the blinded rating HTTP service");
  add_config(cmd);
  cmd->add_option("--data-dir", a.data_dir, "Session storage directory")->required();
  cmd->add_option("--port", a.port, "TCP port")->capture_default_str();
  cmd->add_option("--host", a.host, "Bind address")->capture_default_str();
  cmd->add_option("--admin-token", a.admin_token, "Static token for admin endpoints");
}

int run_serve(const ServeArgs& a, std::ostream& err) {
  if (a.port < 0 || a.port > 65535) throw ValidationError("--port out of range");
  rating::SessionStore store(a.data_dir);
  rating::RatingService service(store);
  if (a.admin_token.empty()) err << "warning: no --admin-token, admin endpoints are disabled\n";
  err << "serving " << store.session_ids().size() << " session(s) on " << a.host << ":"
      << a.port << "\n";
  rating::serve(service, {a.host, a.port, a.admin_token});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("LGE infarct segmentation tooling", "lgetool");
  app.require_subcommand(1);
  app.set_version_flag("--version", "lgetool 1.0.0");

  PhantomArgs phantom;
  RoiArgs roi;
  Seg5sdArgs seg;
  PerturbArgs perturb;
  EvalArgs eval;
  StatsArgs stats;
  ServeArgs serve;
  register_phantom(app, phantom);
  register_roi(app, roi);
  register_seg5sd(app, seg);
  register_perturb(app, perturb);
  register_eval(app, eval);
  register_stats(app, stats);
  register_serve(app, serve);

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "phantom") return run_phantom(phantom, out);
    if (name == "roi") return run_roi(roi, out);
    if (name == "seg5sd") return run_seg5sd(seg, out, err);
    if (name == "perturb") return run_perturb(perturb, out);
    if (name == "eval") return run_eval(eval, out);
    if (name == "stats") return run_stats(stats, out, err);
    if (name == "serve") return run_serve(serve, err);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace lge::cli
