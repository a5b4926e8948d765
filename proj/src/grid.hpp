#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace ldc {

// Dense 2D scalar field, row-major doubles. One Grid holds one channel of an
// image, a confidence/threshold/scale map, or a binary map stored as 0.0/1.0.
// Grids are value types; all operations on them are pure functions.
struct Grid {
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(uint32_t h, uint32_t w, double fill = 0.0);

  double& at(uint32_t i, uint32_t j) { return data[static_cast<size_t>(i) * width + j]; }
  double at(uint32_t i, uint32_t j) const { return data[static_cast<size_t>(i) * width + j]; }
  size_t size() const { return data.size(); }

  bool same_shape(const Grid& o) const { return height == o.height && width == o.width; }
};

// Per-channel stack of 2D fields (row-major within each channel).
struct Tensor3 {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(uint32_t c, uint32_t h, uint32_t w, double fill = 0.0);

  double& at(uint32_t c, uint32_t i, uint32_t j) {
    return data[(static_cast<size_t>(c) * height + i) * width + j];
  }
  double at(uint32_t c, uint32_t i, uint32_t j) const {
    return data[(static_cast<size_t>(c) * height + i) * width + j];
  }
  double* channel(uint32_t c) { return data.data() + static_cast<size_t>(c) * height * width; }
  const double* channel(uint32_t c) const {
    return data.data() + static_cast<size_t>(c) * height * width;
  }
  size_t size() const { return data.size(); }
};

// Throws NumericError if any value is non-finite.
void check_finite(const Grid& g, const std::string& op);
void check_finite(const Tensor3& t, const std::string& op);

// Elementwise product; dimensions must match.
Grid hadamard(const Grid& a, const Grid& b);

// Block-average downsampling. Inputs whose dimensions are not divisible by
// `factor` are edge-replicated up to the next multiple first.
Grid downsample_avg(const Grid& g, uint32_t factor);

double grid_mean(const Grid& g);
double grid_sum(const Grid& g);

Grid grid_from_channel(const Tensor3& t, uint32_t c);
Tensor3 tensor_from_grid(const Grid& g);

// "LDCG v1" grid file: magic LDCG, version byte 1, u32-LE height, u32-LE
// width, then height*width IEEE-754 doubles (LE, row-major). Round trips are
// bit-exact.
void write_grid(const std::string& path, const Grid& g);
Grid read_grid(const std::string& path);

}  // namespace ldc
