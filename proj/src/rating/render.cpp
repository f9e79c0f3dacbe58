#include "lge/rating/render.hpp"

#include <algorithm>
#include <cstring>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <png.h>

#include "lge/error.hpp"
#include "lge/volume.hpp"

namespace lge::rating {

namespace {

png_image image_header(const RasterImage& image) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  header.width = static_cast<png_uint_32>(image.width);
  header.height = static_cast<png_uint_32>(image.height);
  header.format = image.channels == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_GRAY;
  return header;
}

}  // namespace

std::string encode_png(const RasterImage& image) {
  if ((image.channels != 1 && image.channels != 4) || image.width <= 0 || image.height <= 0 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.width) * image.height * image.channels) {
    throw ValidationError("raster does not match its declared shape");
  }
  png_image header = image_header(image);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&header, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + header.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&header, out.data(), &size, 0, image.pixels.data(), 0,
                                 nullptr)) {
    throw IoError(std::string("png encode failed: ") + header.message);
  }
  out.resize(size);
  return out;
}

RasterImage decode_png(std::string_view bytes) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&header, bytes.data(), bytes.size())) {
    throw IoError(std::string("png decode failed: ") + header.message);
  }
  RasterImage out;
  const bool has_alpha = (header.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  const bool has_color = (header.format & PNG_FORMAT_FLAG_COLOR) != 0;
  out.channels = (has_alpha || has_color) ? 4 : 1;
  header.format = out.channels == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_GRAY;
  out.width = static_cast<int>(header.width);
  out.height = static_cast<int>(header.height);
  out.pixels.resize(PNG_IMAGE_SIZE(header));
  if (!png_image_finish_read(&header, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&header);
    throw IoError(std::string("png decode failed: ") + header.message);
  }
  return out;
}

RasterImage grayscale_window(const Image2D& slice) {
  RasterImage out{slice.width(), slice.height(), 1, std::vector<std::uint8_t>(slice.size(), 0)};
  if (slice.empty()) return out;
  const auto [lo, hi] = std::minmax_element(slice.data().begin(), slice.data().end());
  const double range = static_cast<double>(*hi) - static_cast<double>(*lo);
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    const double t = (static_cast<double>(slice.data()[i]) - *lo) / range;
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(t * 255.0 + 0.5, 0.0, 255.0));
  }
  return out;
}

RasterImage label_overlay(const Mask2D& labels, const OverlayStyle& style) {
  RasterImage out{labels.width(), labels.height(), 4,
                  std::vector<std::uint8_t>(labels.size() * 4, 0)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint8_t code = labels.data()[i];
    const Rgba* colour = nullptr;
    if (code == code_of(ClassId::scar)) colour = &style.scar;
    if (code == code_of(ClassId::mvo)) colour = &style.mvo;
    if (colour) std::copy(colour->begin(), colour->end(), out.pixels.begin() + i * 4);
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const char*, 6, 8>>;
  std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::string base64_decode(std::string_view text) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<const char*>, 8, 6>;
  std::size_t padding = 0;
  while (!text.empty() && text.back() == '=') {
    text.remove_suffix(1);
    ++padding;
  }
  if (padding > 2) throw ValidationError("invalid base64 padding");
  try {
    return std::string(It(text.data()), It(text.data() + text.size()));
  } catch (const std::exception&) {
    throw ValidationError("invalid base64 text");
  }
}

}  // namespace lge::rating
