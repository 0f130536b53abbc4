#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lobforge::io {

// Minimal PNG codec for 8-bit grayscale frames. meta_text, when non-empty,
// is stored in a tEXt chunk under the "lobforge" keyword so every exported
// image carries its resolved config.
void write_png_gray8(const std::string& path, std::size_t width,
                     std::size_t height, const std::uint8_t* pixels,
                     const std::string& meta_text = "");

struct PngImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
  std::string meta_text;
};

PngImage read_png_gray8(const std::string& path);

}  // namespace lobforge::io
