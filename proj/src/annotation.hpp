#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace ldc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Box {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
  double w() const { return x2 - x1; }
  double h() const { return y2 - y1; }
  double area() const { return w() * h(); }
};

// Per-image point annotations with optional aligned boxes (box i contains
// point i).
struct Annotation {
  std::string image_id;
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<Point> points;
  std::optional<std::vector<Box>> boxes;

  bool has_boxes() const { return boxes.has_value(); }
  void validate() const;
};

// Dataset directory layout: images/<id>.pgm, annotations.json, splits.json,
// optional labels/{conf,size}/<id>.ldcg.
struct Splits {
  std::vector<std::string> train, val, test;
};

struct Dataset {
  std::string root;
  std::vector<Annotation> annotations;  // sorted by image_id
  Splits splits;

  const Annotation& find(const std::string& id) const;
  std::string image_path(const std::string& id) const;
  std::string label_path(const std::string& kind, const std::string& id) const;
  const std::vector<std::string>& split(const std::string& name) const;
};

std::vector<Annotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<Annotation>& anns);
Splits read_splits(const std::string& path);
void write_splits(const std::string& path, const Splits& splits);

// Loads annotations + splits and checks that every annotated image file
// exists. Label grids are optional at this point.
Dataset load_dataset(const std::string& root);

}  // namespace ldc
