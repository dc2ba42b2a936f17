#include "mp/tensor.hpp"

#include <cmath>
#include <sstream>

#include "mp/errors.hpp"

namespace mp {

Tensor::Tensor(std::vector<std::size_t> dims, double value) : shape(std::move(dims)) {
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == 0) {
      throw DimensionError("Tensor: axis " + std::to_string(i) + " has zero extent");
    }
  }
  data.assign(volume(shape), value);
}

std::size_t Tensor::volume(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape.size()) {
    throw DimensionError("Tensor: axis " + std::to_string(axis) + " out of range for rank " +
                         std::to_string(shape.size()));
  }
  return shape[axis];
}

void Tensor::fill(double v) {
  for (double& x : data) x = v;
}

bool Tensor::all_finite() const {
  for (double x : data) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape, 0.0); }

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
}

}  // namespace mp
