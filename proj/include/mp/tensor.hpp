#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mp {

// Dense N-dimensional array of doubles, row-major. All training math is done
// at 64-bit precision.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double value = 0.0);

  static std::size_t volume(const std::vector<std::size_t>& dims);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t axis) const;

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double& at2(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  const double& at2(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  double& at3(std::size_t c, std::size_t i, std::size_t j) {
    return data[(c * shape[1] + i) * shape[2] + j];
  }
  const double& at3(std::size_t c, std::size_t i, std::size_t j) const {
    return data[(c * shape[1] + i) * shape[2] + j];
  }

  double& at4(std::size_t k, std::size_t c, std::size_t i, std::size_t j) {
    return data[((k * shape[1] + c) * shape[2] + i) * shape[3] + j];
  }
  const double& at4(std::size_t k, std::size_t c, std::size_t i, std::size_t j) const {
    return data[((k * shape[1] + c) * shape[2] + i) * shape[3] + j];
  }

  void fill(double v);
  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
  std::string shape_str() const;  // e.g. "[2, 3, 4]"
};

Tensor zeros_like(const Tensor& t);

// Throws DimensionError naming `what` when shapes differ.
void check_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace mp
