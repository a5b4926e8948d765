#include "labelgen.hpp"

#include <cmath>
#include <limits>

namespace ldc {

void LabelGenConfig::validate() const {
  if (c <= 0.0) throw InputError("LabelGenConfig: c must be > 0");
  if (!(r > 0.0 && r < 1.0)) throw InputError("LabelGenConfig: r must be in (0, 1)");
}

std::vector<double> nearest_neighbor_dist(const std::vector<Point>& points) {
  const size_t n = points.size();
  std::vector<double> out(n, std::numeric_limits<double>::infinity());
  // O(n^2) scan; n stays small at desk scale and avoids a KD-tree dependency.
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d < out[i]) out[i] = d;
      if (d < out[j]) out[j] = d;
    }
  }
  return out;
}

std::vector<SizePair> point_guide_sizes(const std::vector<Point>& points,
                                        const LabelGenConfig& cfg) {
  cfg.validate();
  std::vector<double> nn = nearest_neighbor_dist(points);
  std::vector<SizePair> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const double s = std::min(cfg.c, cfg.r * nn[i]);  // inf nn clamps to c
    out[i] = {s, s};
  }
  return out;
}

std::vector<SizePair> box_guide_sizes(const std::vector<Point>& points,
                                      const std::vector<Box>& boxes, const LabelGenConfig& cfg) {
  if (boxes.size() != points.size())
    throw InputError("box_guide_sizes: box/point count mismatch");
  std::vector<SizePair> pg = point_guide_sizes(points, cfg);
  std::vector<SizePair> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const double w = boxes[i].w();
    const double h = boxes[i].h();
    if (w <= 0.0 || h <= 0.0)
      throw InputError("box_guide_sizes: zero-size box at index " + std::to_string(i));
    if (w > h) {
      const double wb = std::min(pg[i].w, w);
      out[i] = {wb, wb * h / w};
    } else {
      const double hb = std::min(pg[i].h, h);
      out[i] = {hb * w / h, hb};
    }
  }
  return out;
}

namespace {

bool inside_mask(double px, double py, const Point& center, const SizePair& size,
                 MaskShape shape) {
  const double hw = size.w / 2.0;
  const double hh = size.h / 2.0;
  if (hw <= 0.0 || hh <= 0.0) return false;
  const double dx = px - center.x;
  const double dy = py - center.y;
  if (shape == MaskShape::kRectangle) {
    // Half-open so that a w-pixel-wide mask covers exactly w pixel centers.
    return dx >= -hw && dx < hw && dy >= -hh && dy < hh;
  }
  const double nx = dx / hw;
  const double ny = dy / hh;
  return nx * nx + ny * ny < 1.0;
}

// Shared rasterizer: writes `values[i]` over the mask of point i; on
// contested pixels the nearest center wins.
Grid rasterize(const Annotation& ann, const std::vector<SizePair>& sizes,
               const std::vector<double>& values, MaskShape shape) {
  Grid out(ann.height, ann.width);
  Grid best_d2(ann.height, ann.width, std::numeric_limits<double>::infinity());
  for (size_t k = 0; k < ann.points.size(); ++k) {
    const Point& p = ann.points[k];
    const SizePair& s = sizes[k];
    const int j0 = std::max(0, static_cast<int>(std::floor(p.x - s.w / 2.0 - 1.0)));
    const int j1 = std::min(static_cast<int>(ann.width) - 1,
                            static_cast<int>(std::ceil(p.x + s.w / 2.0 + 1.0)));
    const int i0 = std::max(0, static_cast<int>(std::floor(p.y - s.h / 2.0 - 1.0)));
    const int i1 = std::min(static_cast<int>(ann.height) - 1,
                            static_cast<int>(std::ceil(p.y + s.h / 2.0 + 1.0)));
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        const double px = j + 0.5, py = i + 0.5;
        if (!inside_mask(px, py, p, s, shape)) continue;
        const double dx = px - p.x, dy = py - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2.at(i, j)) {
          best_d2.at(i, j) = d2;
          out.at(i, j) = values[k];
        }
      }
    }
  }
  return out;
}

}  // namespace

Grid render_confidence_gt(const Annotation& ann, const std::vector<SizePair>& sizes,
                          MaskShape shape) {
  if (sizes.size() != ann.points.size())
    throw InputError("render_confidence_gt: size/point count mismatch");
  std::vector<double> ones(ann.points.size(), 1.0);
  return rasterize(ann, sizes, ones, shape);
}

Grid render_size_map(const Annotation& ann, const std::vector<SizePair>& sizes,
                     const std::vector<double>& sigma, MaskShape shape) {
  if (sizes.size() != ann.points.size() || sigma.size() != ann.points.size())
    throw InputError("render_size_map: size/point count mismatch");
  return rasterize(ann, sizes, sigma, shape);
}

std::vector<double> instance_sigmas(const Annotation& ann, const LabelGenConfig& cfg) {
  std::vector<double> out(ann.points.size());
  if (ann.has_boxes()) {
    for (size_t i = 0; i < out.size(); ++i) {
      const Box& b = (*ann.boxes)[i];
      out[i] = std::sqrt(b.w() * b.w() + b.h() * b.h()) / 2.0;
    }
  } else {
    std::vector<SizePair> pg = point_guide_sizes(ann.points, cfg);
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = std::sqrt(pg[i].w * pg[i].w + pg[i].h * pg[i].h) / 2.0;
  }
  return out;
}

Labels generate_labels(const Annotation& ann, const LabelGenConfig& cfg) {
  cfg.validate();
  std::vector<SizePair> sizes = ann.has_boxes()
                                    ? box_guide_sizes(ann.points, *ann.boxes, cfg)
                                    : point_guide_sizes(ann.points, cfg);
  std::vector<double> sigma = instance_sigmas(ann, cfg);
  Labels lab;
  lab.confidence = render_confidence_gt(ann, sizes, cfg.mask_shape);
  lab.size = render_size_map(ann, sizes, sigma, cfg.mask_shape);
  return lab;
}

}  // namespace ldc
