#pragma once

#include <vector>

#include "annotation.hpp"
#include "grid.hpp"

namespace ldc {

enum class MaskShape { kRectangle, kEllipse };

struct LabelGenConfig {
  double c = 15.0;   // maximum dilated size, pixels
  double r = 0.25;   // nearest-neighbour fraction; keeps adjacent blobs apart
  MaskShape mask_shape = MaskShape::kRectangle;

  void validate() const;
};

// Distance to the nearest other point; +inf sentinel when fewer than two
// points exist (the dilated size then falls back to c).
std::vector<double> nearest_neighbor_dist(const std::vector<Point>& points);

struct SizePair {
  double w = 0.0;
  double h = 0.0;
};

// Point-guide dilated sizes: w = h = min(c, r * nn_dist).
std::vector<SizePair> point_guide_sizes(const std::vector<Point>& points,
                                        const LabelGenConfig& cfg);

// Box-guide dilated sizes: the dominant box side is clamped by the point-guide
// size, the other side follows at the box aspect ratio.
std::vector<SizePair> box_guide_sizes(const std::vector<Point>& points,
                                      const std::vector<Box>& boxes, const LabelGenConfig& cfg);

// Rasterizes the independent-instance confidence map: value 1 inside each
// point's centered mask, 0 elsewhere. Pixel (i,j) participates when its
// center (j+0.5, i+0.5) lies inside the half-open mask footprint.
Grid render_confidence_gt(const Annotation& ann, const std::vector<SizePair>& sizes,
                          MaskShape shape);

// Per-blob half-diagonal written over each instance mask; background 0. On
// overlap the nearest center wins. sigma[i] must align with ann.points.
Grid render_size_map(const Annotation& ann, const std::vector<SizePair>& sizes,
                     const std::vector<double>& sigma, MaskShape shape);

// Half-diagonal sizes per instance: from real boxes when present, otherwise
// from the point-guide pseudo boxes.
std::vector<double> instance_sigmas(const Annotation& ann, const LabelGenConfig& cfg);

// Full label generation for one image: box-guide masks when boxes exist,
// point-guide otherwise; size map per instance_sigmas.
struct Labels {
  Grid confidence;
  Grid size;
};
Labels generate_labels(const Annotation& ann, const LabelGenConfig& cfg);

}  // namespace ldc
