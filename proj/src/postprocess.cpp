#include "postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

using json = nlohmann::ordered_json;

namespace ldc {

namespace {

struct UnionFind {
  std::vector<int32_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int32_t find(int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

uint32_t clamp_pixel(double coord, uint32_t limit) {
  const auto v = static_cast<int64_t>(std::floor(coord));
  if (v < 0) return 0;
  if (v >= static_cast<int64_t>(limit)) return limit - 1;
  return static_cast<uint32_t>(v);
}

}  // namespace

std::vector<Blob> connected_components(const Grid& bin, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw InputError("connected_components: connectivity must be 4 or 8");
  const int H = static_cast<int>(bin.height), W = static_cast<int>(bin.width);
  for (double v : bin.data) {
    if (v != 0.0 && v != 1.0)
      throw InputError("connected_components: map is not binary");
  }
  UnionFind uf(bin.size());
  auto idx = [W](int i, int j) { return i * W + j; };
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      if (bin.data[idx(i, j)] == 0.0) continue;
      // Join with already-visited neighbours (left, up, and diagonals for 8).
      if (j > 0 && bin.data[idx(i, j - 1)] != 0.0) uf.unite(idx(i, j), idx(i, j - 1));
      if (i > 0 && bin.data[idx(i - 1, j)] != 0.0) uf.unite(idx(i, j), idx(i - 1, j));
      if (connectivity == 8 && i > 0) {
        if (j > 0 && bin.data[idx(i - 1, j - 1)] != 0.0) uf.unite(idx(i, j), idx(i - 1, j - 1));
        if (j < W - 1 && bin.data[idx(i - 1, j + 1)] != 0.0) uf.unite(idx(i, j), idx(i - 1, j + 1));
      }
    }
  }
  std::vector<int32_t> label(bin.size(), -1);
  std::vector<Blob> blobs;
  std::vector<double> sum_i, sum_j;
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      if (bin.data[idx(i, j)] == 0.0) continue;
      const int32_t root = uf.find(idx(i, j));
      int32_t lab = label[root];
      if (lab < 0) {
        lab = static_cast<int32_t>(blobs.size());
        label[root] = lab;
        Blob b;
        b.min_i = b.max_i = static_cast<uint32_t>(i);
        b.min_j = b.max_j = static_cast<uint32_t>(j);
        blobs.push_back(b);
        sum_i.push_back(0.0);
        sum_j.push_back(0.0);
      }
      Blob& b = blobs[lab];
      b.min_i = std::min(b.min_i, static_cast<uint32_t>(i));
      b.max_i = std::max(b.max_i, static_cast<uint32_t>(i));
      b.min_j = std::min(b.min_j, static_cast<uint32_t>(j));
      b.max_j = std::max(b.max_j, static_cast<uint32_t>(j));
      b.pixel_count += 1;
      sum_i[lab] += i;
      sum_j[lab] += j;
    }
  }
  for (size_t k = 0; k < blobs.size(); ++k) {
    blobs[k].cx = sum_j[k] / blobs[k].pixel_count + 0.5;
    blobs[k].cy = sum_i[k] / blobs[k].pixel_count + 0.5;
  }
  return blobs;
}

DecodedSize decode_box(const Blob& blob, const Grid& scale_map) {
  const double wp = blob.extent_w();
  const double hp = blob.extent_h();
  const double diag = std::sqrt(wp * wp + hp * hp);
  const double cos_a = wp / diag;
  const double sin_a = hp / diag;
  const uint32_t i = clamp_pixel(blob.cy, scale_map.height);
  const uint32_t j = clamp_pixel(blob.cx, scale_map.width);
  const double sigma = scale_map.at(i, j);
  if (sigma <= 0.0) return {wp / 2.0, hp / 2.0, true};
  return {sigma * cos_a, sigma * sin_a, false};
}

double blob_score(const Blob& blob, const Grid& conf) {
  const uint32_t i = clamp_pixel(blob.cy, conf.height);
  const uint32_t j = clamp_pixel(blob.cx, conf.width);
  return conf.at(i, j);
}

double blob_score_mean(const Blob& blob, const Grid& conf, const Grid& bin) {
  // Mean confidence over the blob's own pixels, recovered with a local flood
  // fill seeded inside the blob (the centroid pixel can miss concave blobs).
  if (!conf.same_shape(bin)) throw InputError("blob_score_mean: shape mismatch");
  const int H = static_cast<int>(bin.height), W = static_cast<int>(bin.width);
  int seed_i = static_cast<int>(clamp_pixel(blob.cy, bin.height));
  int seed_j = static_cast<int>(clamp_pixel(blob.cx, bin.width));
  if (bin.at(seed_i, seed_j) == 0.0) {
    seed_i = -1;
    for (uint32_t i = blob.min_i; i <= blob.max_i && seed_i < 0; ++i)
      for (uint32_t j = blob.min_j; j <= blob.max_j; ++j)
        if (bin.at(i, j) != 0.0) {
          seed_i = static_cast<int>(i);
          seed_j = static_cast<int>(j);
          break;
        }
    if (seed_i < 0) return blob_score(blob, conf);
  }
  std::vector<uint8_t> seen(bin.size(), 0);
  std::vector<std::pair<int, int>> stack{{seed_i, seed_j}};
  seen[static_cast<size_t>(seed_i) * W + seed_j] = 1;
  double sum = 0.0;
  size_t n = 0;
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    sum += conf.at(i, j);
    ++n;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int ni = i + di, nj = j + dj;
        if (ni < 0 || nj < 0 || ni >= H || nj >= W) continue;
        const size_t key = static_cast<size_t>(ni) * W + nj;
        if (seen[key] || bin.at(ni, nj) == 0.0) continue;
        seen[key] = 1;
        stack.emplace_back(ni, nj);
      }
    }
  }
  return sum / static_cast<double>(n);
}

Localization localize(const Grid& bin, int connectivity) {
  Localization out;
  for (const Blob& b : connected_components(bin, connectivity)) out.points.push_back({b.cx, b.cy});
  out.count = out.points.size();
  return out;
}

ImagePrediction postprocess_image(const std::string& id, const Grid& bin, const Grid& conf,
                                  const Grid& scale_map, int connectivity, ScoreMode score_mode) {
  if (!bin.same_shape(conf) || !bin.same_shape(scale_map))
    throw InputError("postprocess_image: map shape mismatch");
  ImagePrediction pred;
  pred.id = id;
  pred.width = bin.width;
  pred.height = bin.height;
  for (const Blob& b : connected_components(bin, connectivity)) {
    pred.points.push_back({b.cx, b.cy});
    DecodedSize sz = decode_box(b, scale_map);
    Detection det;
    det.x1 = std::max(0.0, b.cx - sz.half_w);
    det.y1 = std::max(0.0, b.cy - sz.half_h);
    det.x2 = std::min(static_cast<double>(bin.width), b.cx + sz.half_w);
    det.y2 = std::min(static_cast<double>(bin.height), b.cy + sz.half_h);
    det.score = score_mode == ScoreMode::kCenter ? blob_score(b, conf)
                                                 : blob_score_mean(b, conf, bin);
    det.size_fallback = sz.fallback;
    pred.boxes.push_back(det);
  }
  pred.count = pred.points.size();
  return pred;
}

void write_predictions(const std::string& path, const std::vector<ImagePrediction>& preds) {
  json images = json::array();
  for (const ImagePrediction& p : preds) {
    json ji;
    ji["id"] = p.id;
    ji["width"] = p.width;
    ji["height"] = p.height;
    json pts = json::array();
    for (const Point& pt : p.points) pts.push_back({pt.x, pt.y});
    ji["points"] = std::move(pts);
    json boxes = json::array();
    for (const Detection& d : p.boxes) boxes.push_back({d.x1, d.y1, d.x2, d.y2, d.score});
    ji["boxes"] = std::move(boxes);
    ji["count"] = p.count;
    images.push_back(std::move(ji));
  }
  json j;
  j["images"] = std::move(images);
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("write_predictions: cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write_predictions: write failed for '" + path + "'");
}

std::vector<ImagePrediction> read_predictions(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_predictions: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError("read_predictions: invalid JSON in '" + path + "' at byte " +
                      std::to_string(e.byte));
  }
  std::vector<ImagePrediction> out;
  for (const auto& ji : j.at("images")) {
    ImagePrediction p;
    p.id = ji.at("id").get<std::string>();
    p.width = ji.value("width", 0u);
    p.height = ji.value("height", 0u);
    for (const auto& jp : ji.at("points")) p.points.push_back({jp[0], jp[1]});
    for (const auto& jb : ji.at("boxes")) {
      Detection d;
      d.x1 = jb[0];
      d.y1 = jb[1];
      d.x2 = jb[2];
      d.y2 = jb[3];
      d.score = jb[4];
      p.boxes.push_back(d);
    }
    p.count = ji.at("count").get<size_t>();
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const ImagePrediction& a, const ImagePrediction& b) { return a.id < b.id; });
  return out;
}

}  // namespace ldc
