#include "image_io.hpp"

#include <cmath>
#include <fstream>

namespace ldc {

namespace {

// Reads one whitespace/comment-delimited token from a PNM header.
std::string next_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty()) throw FormatError("pnm: truncated header in '" + path + "'");
  return tok;
}

struct PnmHeader {
  uint32_t width, height;
};

PnmHeader read_header(std::istream& in, const std::string& magic, const std::string& path) {
  std::string m = next_token(in, path);
  if (m != magic) throw FormatError("pnm: expected " + magic + " magic in '" + path + "'");
  uint32_t w = static_cast<uint32_t>(std::stoul(next_token(in, path)));
  uint32_t h = static_cast<uint32_t>(std::stoul(next_token(in, path)));
  uint32_t maxval = static_cast<uint32_t>(std::stoul(next_token(in, path)));
  if (w == 0 || h == 0) throw FormatError("pnm: zero dimension in '" + path + "'");
  if (maxval != 255) throw FormatError("pnm: only maxval 255 is supported ('" + path + "')");
  return {w, h};
}

uint8_t quantize(double v) {
  double c = std::min(1.0, std::max(0.0, v));
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

}  // namespace

Grid read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_pgm: cannot open '" + path + "'");
  PnmHeader hd = read_header(f, "P5", path);
  std::vector<char> raw(static_cast<size_t>(hd.width) * hd.height);
  f.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(f.gcount()) != raw.size())
    throw FormatError("read_pgm: truncated pixel data in '" + path + "'");
  Grid g(hd.height, hd.width);
  for (size_t k = 0; k < raw.size(); ++k)
    g.data[k] = static_cast<uint8_t>(raw[k]) / 255.0;
  return g;
}

void write_pgm(const std::string& path, const Grid& g) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("write_pgm: cannot open '" + path + "' for writing");
  f << "P5\n" << g.width << " " << g.height << "\n255\n";
  std::vector<char> raw(g.size());
  for (size_t k = 0; k < g.size(); ++k) raw[k] = static_cast<char>(quantize(g.data[k]));
  f.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!f) throw IoError("write_pgm: write failed for '" + path + "'");
}

ImageRgb read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_ppm: cannot open '" + path + "'");
  PnmHeader hd = read_header(f, "P6", path);
  ImageRgb img(hd.height, hd.width);
  std::vector<char> raw(img.data.size());
  f.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(f.gcount()) != raw.size())
    throw FormatError("read_ppm: truncated pixel data in '" + path + "'");
  for (size_t k = 0; k < raw.size(); ++k) img.data[k] = static_cast<uint8_t>(raw[k]);
  return img;
}

void write_ppm(const std::string& path, const ImageRgb& img) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("write_ppm: cannot open '" + path + "' for writing");
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (!f) throw IoError("write_ppm: write failed for '" + path + "'");
}

}  // namespace ldc
