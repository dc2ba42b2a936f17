#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mp/tensor.hpp"

namespace mp {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> pixels;  // row-major, 0..255

  int at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct ScaleRange {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;  // constant input: everything maps to mid-gray
};

// Per-image min-max scaling of a rank-2 tensor to 0..255 (nearest integer).
// A constant image has no contrast to stretch; it maps to 128 and the range
// is flagged degenerate.
GrayImage to_gray(const Tensor& plane, ScaleRange* range = nullptr);

// Rank-3 [c, h, w] channel and rank-4 [k, c, h, w] kernel planes as rank-2
// tensors, for export.
Tensor channel_plane(const Tensor& t, std::size_t channel);
Tensor kernel_plane(const Tensor& t, std::size_t k, std::size_t channel);

// Plain-text P2 PGM, maxval 255, lines kept short.
void write_pgm(const std::string& path, const GrayImage& image);

// Strict P2 reader ('#' comments allowed); malformed input is a ParseError
// carrying the byte offset.
GrayImage read_pgm(const std::string& path);
GrayImage parse_pgm(const std::string& text);

}  // namespace mp
