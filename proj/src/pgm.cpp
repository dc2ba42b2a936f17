#include "mp/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mp/errors.hpp"

namespace mp {

GrayImage to_gray(const Tensor& plane, ScaleRange* range) {
  if (plane.rank() != 2) {
    throw DimensionError("to_gray: expected a rank-2 tensor, got " + plane.shape_str());
  }
  double lo = plane[0], hi = plane[0];
  for (double v : plane.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  GrayImage img;
  img.height = plane.dim(0);
  img.width = plane.dim(1);
  img.pixels.resize(plane.size());
  bool degenerate = (hi == lo);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    img.pixels[i] =
        degenerate ? 128 : static_cast<int>(std::lround((plane[i] - lo) * 255.0 / (hi - lo)));
  }
  if (range) *range = {lo, hi, degenerate};
  return img;
}

Tensor channel_plane(const Tensor& t, std::size_t channel) {
  if (t.rank() != 3) {
    throw DimensionError("channel_plane: expected a rank-3 tensor, got " + t.shape_str());
  }
  Tensor plane({t.dim(1), t.dim(2)});
  for (std::size_t i = 0; i < t.dim(1); ++i) {
    for (std::size_t j = 0; j < t.dim(2); ++j) plane.at2(i, j) = t.at3(channel, i, j);
  }
  return plane;
}

Tensor kernel_plane(const Tensor& t, std::size_t k, std::size_t channel) {
  if (t.rank() != 4) {
    throw DimensionError("kernel_plane: expected a rank-4 tensor, got " + t.shape_str());
  }
  Tensor plane({t.dim(2), t.dim(3)});
  for (std::size_t i = 0; i < t.dim(2); ++i) {
    for (std::size_t j = 0; j < t.dim(3); ++j) plane.at2(i, j) = t.at4(k, channel, i, j);
  }
  return plane;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  if (image.width == 0 || image.height == 0 ||
      image.pixels.size() != image.width * image.height) {
    throw DimensionError("write_pgm: inconsistent image dimensions");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P2\n" << image.width << " " << image.height << "\n255\n";
  std::size_t line_len = 0;
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    int v = image.pixels[i];
    if (v < 0 || v > 255) throw InputError("write_pgm: pixel out of range 0..255");
    std::string tok = std::to_string(v);
    if (line_len == 0) {
      out << tok;
      line_len = tok.size();
    } else if (line_len + 1 + tok.size() > 68) {  // keep lines short
      out << '\n' << tok;
      line_len = tok.size();
    } else {
      out << ' ' << tok;
      line_len += 1 + tok.size();
    }
  }
  out << '\n';
  if (!out) throw IoError("failed writing image to '" + path + "'");
}

namespace {

class PgmScanner {
 public:
  PgmScanner(const std::string& text, std::size_t start) : text_(text), off_(start) {}

  // Offset where the most recent number began; error positions point here.
  std::size_t last_start() const { return last_start_; }

  long number(const char* what) {
    skip_separators();
    last_start_ = off_;
    if (off_ == text_.size()) {
      throw ParseError(std::string("pgm truncated: expected ") + what, off_);
    }
    long value = 0;
    std::size_t digits = 0;
    while (off_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[off_]))) {
      value = value * 10 + (text_[off_] - '0');
      if (value > 1000000000L) {
        throw ParseError(std::string("pgm: implausible ") + what, last_start_);
      }
      ++off_;
      ++digits;
    }
    if (digits == 0) {
      throw ParseError(std::string("pgm: expected a number for ") + what, off_);
    }
    return value;
  }

  bool at_end() {
    skip_separators();
    return off_ == text_.size();
  }

  std::size_t offset() const { return off_; }

 private:
  void skip_separators() {
    while (off_ < text_.size()) {
      char c = text_[off_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++off_;
      } else if (c == '#') {
        while (off_ < text_.size() && text_[off_] != '\n') ++off_;
      } else {
        return;
      }
    }
  }

  const std::string& text_;
  std::size_t off_ = 0;
  std::size_t last_start_ = 0;
};

}  // namespace

GrayImage parse_pgm(const std::string& text) {
  if (text.size() < 2 || text[0] != 'P' || text[1] != '2') {
    throw ParseError("pgm: missing P2 magic", 0);
  }
  PgmScanner s(text, 2);
  long w = s.number("width");
  long h = s.number("height");
  if (w <= 0 || h <= 0) throw ParseError("pgm: dimensions must be positive", s.last_start());
  long maxval = s.number("maxval");
  if (maxval != 255) {
    throw ParseError("pgm: unsupported maxval " + std::to_string(maxval), s.last_start());
  }
  GrayImage img;
  img.width = static_cast<std::size_t>(w);
  img.height = static_cast<std::size_t>(h);
  img.pixels.reserve(img.width * img.height);
  for (std::size_t i = 0; i < img.width * img.height; ++i) {
    long v = s.number("pixel");
    if (v > maxval) {
      throw ParseError("pgm: pixel " + std::to_string(v) + " exceeds maxval", s.last_start());
    }
    img.pixels.push_back(static_cast<int>(v));
  }
  if (!s.at_end()) throw ParseError("pgm: trailing content after pixel data", s.offset());
  return img;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

}  // namespace mp
