#include "lge/volume.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lge {

namespace {

constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "background", "bloodpool", "remote_myocardium", "scar", "mvo"};

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string_view class_name(ClassId c) { return kClassNames.at(code_of(c)); }

ClassId class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<ClassId>(i);
  }
  throw ValidationError("unknown class name: " + std::string(name));
}

ClassSet parse_class_set(std::string_view text) {
  if (text == "infarct") return kInfarct;
  if (text == "myocardium") return kMyocardium;
  if (text == "lv") return kLeftVentricle;
  ClassSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('+', start);
    if (end == std::string_view::npos) end = text.size();
    out = out | ClassSet{class_from_name(text.substr(start, end - start))};
    start = end + 1;
  }
  return out;
}

void Spacing::validate() const {
  if (!(dx > 0 && dy > 0 && slice_thickness > 0 && interslice_gap > 0)) {
    throw ValidationError("spacing fields must all be strictly positive");
  }
}

MaskVolume MaskVolume::zeros(Dims dims, Spacing spacing) {
  MaskVolume v;
  v.dims = dims;
  v.spacing = spacing;
  v.image.assign(dims.voxel_count(), 0.0f);
  v.labels.assign(dims.voxel_count(), 0);
  return v;
}

void MaskVolume::validate() const {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) {
    throw ValidationError("volume dims must be positive");
  }
  if (image.size() != dims.voxel_count()) {
    throw ValidationError("image payload size does not match dims");
  }
  if (labels.size() != dims.voxel_count()) {
    throw ValidationError("labels payload size does not match dims");
  }
  spacing.validate();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_valid_class_code(labels[i])) {
      throw ValidationError("invalid label code " + std::to_string(labels[i]) +
                            " at voxel index " + std::to_string(i));
    }
  }
}

Image2D MaskVolume::image_slice(int z) const {
  const auto begin = image.begin() + static_cast<std::ptrdiff_t>(dims.slice_size() * z);
  return Image2D(dims.nx, dims.ny,
                 std::vector<float>(begin, begin + static_cast<std::ptrdiff_t>(dims.slice_size())));
}

Mask2D MaskVolume::label_slice(int z) const {
  const auto begin = labels.begin() + static_cast<std::ptrdiff_t>(dims.slice_size() * z);
  return Mask2D(dims.nx, dims.ny,
                std::vector<std::uint8_t>(begin,
                                          begin + static_cast<std::ptrdiff_t>(dims.slice_size())));
}

void MaskVolume::set_image_slice(int z, const Image2D& slice) {
  if (slice.width() != dims.nx || slice.height() != dims.ny) {
    throw ValidationError("slice dims do not match volume");
  }
  std::copy(slice.data().begin(), slice.data().end(),
            image.begin() + static_cast<std::ptrdiff_t>(dims.slice_size() * z));
}

void MaskVolume::set_label_slice(int z, const Mask2D& slice) {
  if (slice.width() != dims.nx || slice.height() != dims.ny) {
    throw ValidationError("slice dims do not match volume");
  }
  std::copy(slice.data().begin(), slice.data().end(),
            labels.begin() + static_cast<std::ptrdiff_t>(dims.slice_size() * z));
}

std::vector<std::uint8_t> class_mask(const MaskVolume& volume, ClassSet classes) {
  std::vector<std::uint8_t> out(volume.labels.size());
  std::transform(volume.labels.begin(), volume.labels.end(), out.begin(),
                 [classes](std::uint8_t l) { return classes.contains(l) ? 1 : 0; });
  return out;
}

Mask2D class_mask(const Mask2D& labels, ClassSet classes) {
  Mask2D out(labels.width(), labels.height());
  std::transform(labels.data().begin(), labels.data().end(), out.data().begin(),
                 [classes](std::uint8_t l) { return classes.contains(l) ? 1 : 0; });
  return out;
}

std::size_t count_voxels(const MaskVolume& volume, ClassSet classes) {
  return static_cast<std::size_t>(std::count_if(
      volume.labels.begin(), volume.labels.end(),
      [classes](std::uint8_t l) { return classes.contains(l); }));
}

double class_volume_ml(const MaskVolume& volume, ClassSet classes) {
  if (classes.empty()) throw ValidationError("class set must not be empty");
  return static_cast<double>(count_voxels(volume, classes)) *
         volume.spacing.voxel_volume_mm3() / 1000.0;
}

MaskVolume load_volume(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  const auto image_path = dir / "image.raw";
  const auto labels_path = dir / "labels.raw";
  for (const auto& p : {meta_path, image_path, labels_path}) {
    if (!std::filesystem::exists(p)) throw IoError("missing file " + p.string());
  }

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed meta.json: " + std::string(e.what()));
  }

  MaskVolume v;
  try {
    const auto& d = meta.at("dims");
    if (!d.is_array() || d.size() != 3) throw ValidationError("dims must be [nx,ny,nz]");
    v.dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    const auto& s = meta.at("spacing");
    v.spacing = {s.at("dx").get<double>(), s.at("dy").get<double>(),
                 s.at("slice_thickness").get<double>(), s.at("interslice_gap").get<double>()};
    v.patient_id = meta.value("patient_id", "");
    v.series_id = meta.value("series_id", "");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid meta.json: " + std::string(e.what()));
  }
  if (v.dims.nx <= 0 || v.dims.ny <= 0 || v.dims.nz <= 0) {
    throw ValidationError("volume dims must be positive");
  }

  const std::size_t n = v.dims.voxel_count();
  const std::string image_bytes = read_file(image_path);
  const std::string label_bytes = read_file(labels_path);
  if (image_bytes.size() != n * 4) {
    throw ValidationError("dims mismatch: image.raw has " + std::to_string(image_bytes.size()) +
                          " bytes, expected " + std::to_string(n * 4));
  }
  if (label_bytes.size() != n) {
    throw ValidationError("dims mismatch: labels.raw has " + std::to_string(label_bytes.size()) +
                          " bytes, expected " + std::to_string(n));
  }

  v.image.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t raw;
    std::memcpy(&raw, image_bytes.data() + 4 * i, 4);
    v.image[i] = std::bit_cast<float>(to_little_endian(raw));
  }
  v.labels.assign(label_bytes.begin(), label_bytes.end());
  v.validate();
  return v;
}

void save_volume(const MaskVolume& volume, const std::filesystem::path& dir) {
  volume.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["dims"] = {volume.dims.nx, volume.dims.ny, volume.dims.nz};
  meta["spacing"] = {{"dx", volume.spacing.dx},
                     {"dy", volume.spacing.dy},
                     {"slice_thickness", volume.spacing.slice_thickness},
                     {"interslice_gap", volume.spacing.interslice_gap}};
  meta["patient_id"] = volume.patient_id;
  meta["series_id"] = volume.series_id;
  nlohmann::ordered_json label_map;
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    label_map[std::to_string(i)] = kClassNames[i];
  }
  meta["labels"] = label_map;
  const std::string meta_text = meta.dump(2) + "\n";
  write_file(dir / "meta.json", meta_text.data(), meta_text.size());

  std::vector<std::uint32_t> raw(volume.image.size());
  std::transform(volume.image.begin(), volume.image.end(), raw.begin(),
                 [](float f) { return to_little_endian(std::bit_cast<std::uint32_t>(f)); });
  write_file(dir / "image.raw", reinterpret_cast<const char*>(raw.data()), raw.size() * 4);
  write_file(dir / "labels.raw", reinterpret_cast<const char*>(volume.labels.data()),
             volume.labels.size());
}

}  // namespace lge
