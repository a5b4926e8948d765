#include "grid.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace ldc {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

Grid::Grid(uint32_t h, uint32_t w, double fill) : height(h), width(w) {
  if (h == 0 || w == 0) throw InputError("Grid: dimensions must be >= 1");
  data.assign(static_cast<size_t>(h) * w, fill);
}

Tensor3::Tensor3(uint32_t c, uint32_t h, uint32_t w, double fill) : channels(c), height(h), width(w) {
  if (c == 0 || h == 0 || w == 0) throw InputError("Tensor3: dimensions must be >= 1");
  data.assign(static_cast<size_t>(c) * h * w, fill);
}

void check_finite(const Grid& g, const std::string& op) {
  for (double v : g.data) {
    if (!std::isfinite(v)) throw NumericError(op + ": non-finite value in grid");
  }
}

void check_finite(const Tensor3& t, const std::string& op) {
  for (double v : t.data) {
    if (!std::isfinite(v)) throw NumericError(op + ": non-finite value in tensor");
  }
}

Grid hadamard(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) {
    throw InputError("hadamard: shape mismatch (" + std::to_string(a.height) + "x" +
                     std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                     std::to_string(b.width) + ")");
  }
  Grid out(a.height, a.width);
  for (size_t k = 0; k < a.data.size(); ++k) out.data[k] = a.data[k] * b.data[k];
  check_finite(out, "hadamard");
  return out;
}

Grid downsample_avg(const Grid& g, uint32_t factor) {
  if (factor == 0) throw InputError("downsample_avg: factor must be >= 1");
  const Grid* src = &g;
  Grid padded;
  if (g.height % factor != 0 || g.width % factor != 0) {
    uint32_t ph = (g.height + factor - 1) / factor * factor;
    uint32_t pw = (g.width + factor - 1) / factor * factor;
    padded = Grid(ph, pw);
    for (uint32_t i = 0; i < ph; ++i) {
      uint32_t si = std::min(i, g.height - 1);
      for (uint32_t j = 0; j < pw; ++j) padded.at(i, j) = g.at(si, std::min(j, g.width - 1));
    }
    src = &padded;
  }
  Grid out(src->height / factor, src->width / factor);
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (uint32_t i = 0; i < out.height; ++i) {
    for (uint32_t j = 0; j < out.width; ++j) {
      double s = 0.0;
      for (uint32_t u = 0; u < factor; ++u)
        for (uint32_t v = 0; v < factor; ++v) s += src->at(i * factor + u, j * factor + v);
      out.at(i, j) = s * inv;
    }
  }
  return out;
}

double grid_sum(const Grid& g) { return pairwise_sum(g.data); }

double grid_mean(const Grid& g) { return grid_sum(g) / static_cast<double>(g.size()); }

Grid grid_from_channel(const Tensor3& t, uint32_t c) {
  if (c >= t.channels) throw InputError("grid_from_channel: channel out of range");
  Grid g(t.height, t.width);
  std::memcpy(g.data.data(), t.channel(c), sizeof(double) * g.size());
  return g;
}

Tensor3 tensor_from_grid(const Grid& g) {
  Tensor3 t(1, g.height, g.width);
  std::memcpy(t.data.data(), g.data.data(), sizeof(double) * g.size());
  return t;
}

namespace {

constexpr char kMagic[4] = {'L', 'D', 'C', 'G'};
constexpr uint8_t kVersion = 1;

void put_u32le(std::string& buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void write_grid(const std::string& path, const Grid& g) {
  if (g.height == 0 || g.width == 0) throw InputError("write_grid: empty grid");
  std::string buf;
  buf.reserve(13 + g.size() * 8);
  buf.append(kMagic, 4);
  buf.push_back(static_cast<char>(kVersion));
  put_u32le(buf, g.height);
  put_u32le(buf, g.width);
  for (double v : g.data) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("write_grid: cannot open '" + path + "' for writing");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("write_grid: write failed for '" + path + "'");
}

Grid read_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_grid: cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw FormatError("read_grid: bad magic at byte 0 in '" + path + "'");
  if (buf.size() < 5 || p[4] != kVersion)
    throw FormatError("read_grid: unsupported version at byte 4 in '" + path + "'");
  if (buf.size() < 13) throw FormatError("read_grid: truncated header at byte " +
                                         std::to_string(buf.size()) + " in '" + path + "'");
  uint32_t h = get_u32le(p + 5);
  uint32_t w = get_u32le(p + 9);
  if (h == 0 || w == 0) throw FormatError("read_grid: zero dimension in header of '" + path + "'");
  size_t expect = 13 + static_cast<size_t>(h) * w * 8;
  if (buf.size() < expect)
    throw FormatError("read_grid: truncated payload at byte " + std::to_string(buf.size()) +
                      " (expected " + std::to_string(expect) + ") in '" + path + "'");
  if (buf.size() > expect)
    throw FormatError("read_grid: trailing bytes at byte " + std::to_string(expect) + " in '" +
                      path + "'");
  Grid g(h, w);
  for (size_t k = 0; k < g.size(); ++k) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<uint64_t>(p[13 + k * 8 + b]) << (8 * b);
    double v = std::bit_cast<double>(bits);
    if (std::isnan(v) || std::isinf(v))
      throw FormatError("read_grid: non-finite value at byte " + std::to_string(13 + k * 8) +
                        " in '" + path + "'");
    g.data[k] = v;
  }
  return g;
}

}  // namespace ldc
