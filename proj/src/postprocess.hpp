#pragma once

#include <string>
#include <vector>

#include "annotation.hpp"
#include "grid.hpp"

namespace ldc {

// Maximal connected foreground component of a binary map.
struct Blob {
  double cx = 0.0, cy = 0.0;      // foreground-pixel centroid, sub-pixel
  uint32_t min_i = 0, min_j = 0;  // tight bounding extent, pixel indices
  uint32_t max_i = 0, max_j = 0;
  uint32_t pixel_count = 0;

  uint32_t extent_w() const { return max_j - min_j + 1; }
  uint32_t extent_h() const { return max_i - min_i + 1; }
};

// Union-find labeling; blobs come back in row-major order of their first
// pixel. Non-binary input is rejected.
std::vector<Blob> connected_components(const Grid& bin, int connectivity = 8);

struct DecodedSize {
  double half_w = 0.0;
  double half_h = 0.0;
  bool fallback = false;  // non-positive scale sample, blob extents used
};

// Splits the sampled scale value along the blob diagonal's angle. The scale
// map is sampled at the pixel containing the centroid.
DecodedSize decode_box(const Blob& blob, const Grid& scale_map);

// Detection score: confidence sampled at the blob center pixel; optionally
// the mean over the component (requires the binary map).
double blob_score(const Blob& blob, const Grid& conf);
double blob_score_mean(const Blob& blob, const Grid& conf, const Grid& bin);

struct Detection {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
  double score = 0.0;
  bool size_fallback = false;
};

struct Localization {
  std::vector<Point> points;
  size_t count = 0;
};

Localization localize(const Grid& bin, int connectivity = 8);

enum class ScoreMode { kCenter, kComponentMean };

// Full per-image post-processing: blobs -> points, count, decoded boxes.
struct ImagePrediction {
  std::string id;
  uint32_t width = 0, height = 0;
  std::vector<Point> points;
  std::vector<Detection> boxes;
  size_t count = 0;
};

ImagePrediction postprocess_image(const std::string& id, const Grid& bin, const Grid& conf,
                                  const Grid& scale_map, int connectivity = 8,
                                  ScoreMode score_mode = ScoreMode::kCenter);

// Predictions file: {"images": [{"id", "points", "boxes", "count"}, ...]}.
void write_predictions(const std::string& path, const std::vector<ImagePrediction>& preds);
std::vector<ImagePrediction> read_predictions(const std::string& path);

}  // namespace ldc
