#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lge/grid.hpp"

namespace lge::rating {

using Rgba = std::array<std::uint8_t, 4>;

struct OverlayStyle {
  Rgba scar{0, 0, 255, 160};
  Rgba mvo{255, 140, 0, 160};
};

struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 4 (RGBA)
  std::vector<std::uint8_t> pixels;
};

// PNG bytes for an 8-bit gray or RGBA raster. Throws IoError on encoder failure.
std::string encode_png(const RasterImage& image);
RasterImage decode_png(std::string_view bytes);

// Min-max windowed 8-bit grayscale; a constant slice renders black.
RasterImage grayscale_window(const Image2D& slice);

// Transparent except scar and MVO pixels, which take the style colours.
RasterImage label_overlay(const Mask2D& labels, const OverlayStyle& style);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace lge::rating
