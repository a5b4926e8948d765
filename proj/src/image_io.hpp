#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"

namespace ldc {

// 8-bit RGB raster used for overlay rendering.
struct ImageRgb {
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<uint8_t> data;  // row-major, 3 bytes per pixel

  ImageRgb() = default;
  ImageRgb(uint32_t h, uint32_t w) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, 0) {}

  void set(uint32_t i, uint32_t j, uint8_t r, uint8_t g, uint8_t b) {
    size_t k = (static_cast<size_t>(i) * width + j) * 3;
    data[k] = r;
    data[k + 1] = g;
    data[k + 2] = b;
  }
};

// Binary PGM (P5) / PPM (P6), maxval 255 only. Grid values map to [0, 1].
Grid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Grid& g);
ImageRgb read_ppm(const std::string& path);
void write_ppm(const std::string& path, const ImageRgb& img);

}  // namespace ldc
