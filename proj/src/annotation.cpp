#include "annotation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace ldc {

void Annotation::validate() const {
  if (image_id.empty()) throw InputError("annotation: empty image id");
  if (width == 0 || height == 0)
    throw InputError("annotation '" + image_id + "': zero image dimension");
  for (const Point& p : points) {
    if (!(p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < height))
      throw InputError("annotation '" + image_id + "': point outside image bounds");
  }
  if (boxes) {
    if (boxes->size() != points.size())
      throw InputError("annotation '" + image_id + "': box/point count mismatch");
    for (size_t i = 0; i < boxes->size(); ++i) {
      const Box& b = (*boxes)[i];
      if (!(b.x2 > b.x1 && b.y2 > b.y1))
        throw InputError("annotation '" + image_id + "': degenerate box " + std::to_string(i));
      if (b.x1 < 0.0 || b.y1 < 0.0 || b.x2 > width || b.y2 > height)
        throw InputError("annotation '" + image_id + "': box outside image bounds");
      const Point& p = points[i];
      if (p.x < b.x1 || p.x > b.x2 || p.y < b.y1 || p.y > b.y2)
        throw InputError("annotation '" + image_id + "': box " + std::to_string(i) +
                         " does not contain its point");
    }
  }
}

namespace {

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError("invalid JSON in '" + path + "' at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::vector<Annotation> read_annotations(const std::string& path) {
  json j = load_json(path);
  if (!j.contains("images") || !j["images"].is_array())
    throw FormatError("'" + path + "': missing \"images\" array");
  std::vector<Annotation> out;
  for (const auto& ji : j["images"]) {
    Annotation a;
    a.image_id = ji.at("id").get<std::string>();
    a.width = ji.at("width").get<uint32_t>();
    a.height = ji.at("height").get<uint32_t>();
    for (const auto& jp : ji.at("points")) {
      if (!jp.is_array() || jp.size() != 2)
        throw FormatError("'" + path + "': point must be [x, y] in image '" + a.image_id + "'");
      a.points.push_back({jp[0].get<double>(), jp[1].get<double>()});
    }
    if (ji.contains("boxes") && !ji["boxes"].is_null()) {
      std::vector<Box> boxes;
      for (const auto& jb : ji["boxes"]) {
        if (!jb.is_array() || jb.size() != 4)
          throw FormatError("'" + path + "': box must be [x1, y1, x2, y2] in image '" +
                            a.image_id + "'");
        boxes.push_back({jb[0].get<double>(), jb[1].get<double>(), jb[2].get<double>(),
                         jb[3].get<double>()});
      }
      a.boxes = std::move(boxes);
    }
    a.validate();
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(),
            [](const Annotation& a, const Annotation& b) { return a.image_id < b.image_id; });
  return out;
}

void write_annotations(const std::string& path, const std::vector<Annotation>& anns) {
  json images = json::array();
  for (const Annotation& a : anns) {
    json ji;
    ji["id"] = a.image_id;
    ji["width"] = a.width;
    ji["height"] = a.height;
    json pts = json::array();
    for (const Point& p : a.points) pts.push_back({p.x, p.y});
    ji["points"] = std::move(pts);
    if (a.boxes) {
      json boxes = json::array();
      for (const Box& b : *a.boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
      ji["boxes"] = std::move(boxes);
    }
    images.push_back(std::move(ji));
  }
  json j;
  j["images"] = std::move(images);
  dump_json(path, j);
}

Splits read_splits(const std::string& path) {
  json j = load_json(path);
  Splits s;
  for (const auto& id : j.at("train")) s.train.push_back(id.get<std::string>());
  for (const auto& id : j.at("val")) s.val.push_back(id.get<std::string>());
  for (const auto& id : j.at("test")) s.test.push_back(id.get<std::string>());
  return s;
}

void write_splits(const std::string& path, const Splits& splits) {
  json j;
  j["train"] = splits.train;
  j["val"] = splits.val;
  j["test"] = splits.test;
  dump_json(path, j);
}

const Annotation& Dataset::find(const std::string& id) const {
  auto it = std::lower_bound(
      annotations.begin(), annotations.end(), id,
      [](const Annotation& a, const std::string& key) { return a.image_id < key; });
  if (it == annotations.end() || it->image_id != id)
    throw InputError("dataset: no annotation for image '" + id + "'");
  return *it;
}

std::string Dataset::image_path(const std::string& id) const {
  return (fs::path(root) / "images" / (id + ".pgm")).string();
}

std::string Dataset::label_path(const std::string& kind, const std::string& id) const {
  return (fs::path(root) / "labels" / kind / (id + ".ldcg")).string();
}

const std::vector<std::string>& Dataset::split(const std::string& name) const {
  if (name == "train") return splits.train;
  if (name == "val") return splits.val;
  if (name == "test") return splits.test;
  throw InputError("dataset: unknown split '" + name + "' (expected train/val/test)");
}

Dataset load_dataset(const std::string& root) {
  Dataset d;
  d.root = root;
  d.annotations = read_annotations((fs::path(root) / "annotations.json").string());
  d.splits = read_splits((fs::path(root) / "splits.json").string());
  for (const Annotation& a : d.annotations) {
    if (!fs::exists(d.image_path(a.image_id)))
      throw InputError("dataset: missing image file for id '" + a.image_id + "'");
  }
  for (const auto* split : {&d.splits.train, &d.splits.val, &d.splits.test}) {
    for (const std::string& id : *split) d.find(id);
  }
  return d;
}

}  // namespace ldc
