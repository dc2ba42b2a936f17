#include "mp/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mp/errors.hpp"

namespace mp {

void ConvLayerParams::validate() const {
  if (kernels.rank() != 4) {
    throw DimensionError("conv params: kernels must be rank 4, got " + kernels.shape_str());
  }
  if (kernels.dim(2) != kernels.dim(3)) {
    throw DimensionError("conv params: kernels must be square, got " +
                         std::to_string(kernels.dim(2)) + "x" + std::to_string(kernels.dim(3)));
  }
  if (bias.size() != kernels.dim(0)) {
    throw DimensionError("conv params: bias length " + std::to_string(bias.size()) +
                         " != out_maps " + std::to_string(kernels.dim(0)));
  }
}

namespace {

struct ConvDims {
  std::size_t pad_top = 0, pad_left = 0;
  std::size_t out_h = 0, out_w = 0;
};

ConvDims conv_dims(const Tensor& input, const ConvLayerParams& params, Padding pad) {
  if (input.rank() != 3) {
    throw DimensionError("conv2d: input must be rank 3 [channels, H, W], got " +
                         input.shape_str());
  }
  params.validate();
  if (input.dim(0) != params.in_maps()) {
    throw DimensionError("conv2d: input channel axis is " + std::to_string(input.dim(0)) +
                         " but kernels expect " + std::to_string(params.in_maps()));
  }
  std::size_t h = input.dim(1), w = input.dim(2), r = params.kernel_size();
  ConvDims d;
  if (pad == Padding::kSame) {
    d.pad_top = (r - 1) / 2;
    d.pad_left = (r - 1) / 2;
    d.out_h = h;
    d.out_w = w;
  } else {
    if (r > h || r > w) {
      throw DimensionError("conv2d: kernel size " + std::to_string(r) +
                           " exceeds input axes H=" + std::to_string(h) +
                           ", W=" + std::to_string(w) + " in valid mode");
    }
    d.out_h = h - r + 1;
    d.out_w = w - r + 1;
  }
  return d;
}

// Zero-pads so the inner loops run without bounds checks and the summation
// order matches a padded naive loop term for term.
Tensor pad_zero(const Tensor& input, std::size_t pad_top, std::size_t pad_left,
                std::size_t pad_bottom, std::size_t pad_right) {
  if (pad_top == 0 && pad_left == 0 && pad_bottom == 0 && pad_right == 0) return input;
  std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  Tensor out({c, h + pad_top + pad_bottom, w + pad_left + pad_right}, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        out.at3(ch, i + pad_top, j + pad_left) = input.at3(ch, i, j);
      }
    }
  }
  return out;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const ConvLayerParams& params, Padding pad) {
  ConvDims d = conv_dims(input, params, pad);
  std::size_t r = params.kernel_size();
  std::size_t c_in = params.in_maps(), c_out = params.out_maps();
  std::size_t pad_bottom = (pad == Padding::kSame) ? (r - 1) - d.pad_top : 0;
  std::size_t pad_right = (pad == Padding::kSame) ? (r - 1) - d.pad_left : 0;
  Tensor padded = pad_zero(input, d.pad_top, d.pad_left, pad_bottom, pad_right);

  Tensor out({c_out, d.out_h, d.out_w});
  for (std::size_t k = 0; k < c_out; ++k) {
    for (std::size_t i = 0; i < d.out_h; ++i) {
      for (std::size_t j = 0; j < d.out_w; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < c_in; ++c) {
          for (std::size_t s = 0; s < r; ++s) {
            const double* krow = &params.kernels.at4(k, c, s, 0);
            const double* irow = &padded.at3(c, i + s, j);
            for (std::size_t t = 0; t < r; ++t) {
              acc += krow[t] * irow[t];
            }
          }
        }
        out.at3(k, i, j) = acc + params.bias[k];
      }
    }
  }
  return out;
}

ConvGrads conv2d_backward(const Tensor& input, const ConvLayerParams& params,
                          const Tensor& grad_out, Padding pad) {
  ConvDims d = conv_dims(input, params, pad);
  std::size_t r = params.kernel_size();
  std::size_t c_in = params.in_maps(), c_out = params.out_maps();
  std::vector<std::size_t> expect = {c_out, d.out_h, d.out_w};
  if (grad_out.shape != expect) {
    throw DimensionError("conv2d_backward: grad_out shape " + grad_out.shape_str() +
                         " does not match forward output [" + std::to_string(c_out) + ", " +
                         std::to_string(d.out_h) + ", " + std::to_string(d.out_w) + "]");
  }
  std::size_t pad_bottom = (pad == Padding::kSame) ? (r - 1) - d.pad_top : 0;
  std::size_t pad_right = (pad == Padding::kSame) ? (r - 1) - d.pad_left : 0;
  Tensor padded = pad_zero(input, d.pad_top, d.pad_left, pad_bottom, pad_right);

  ConvGrads grads;
  grads.kernels = zeros_like(params.kernels);
  grads.bias.assign(c_out, 0.0);
  Tensor grad_padded(padded.shape, 0.0);

  for (std::size_t k = 0; k < c_out; ++k) {
    for (std::size_t i = 0; i < d.out_h; ++i) {
      for (std::size_t j = 0; j < d.out_w; ++j) {
        double g = grad_out.at3(k, i, j);
        grads.bias[k] += g;
        if (g == 0.0) continue;
        for (std::size_t c = 0; c < c_in; ++c) {
          for (std::size_t s = 0; s < r; ++s) {
            double* gk = &grads.kernels.at4(k, c, s, 0);
            double* gp = &grad_padded.at3(c, i + s, j);
            const double* kr = &params.kernels.at4(k, c, s, 0);
            const double* ir = &padded.at3(c, i + s, j);
            for (std::size_t t = 0; t < r; ++t) {
              gk[t] += g * ir[t];
              gp[t] += g * kr[t];
            }
          }
        }
      }
    }
  }

  // Crop the padding border back off.
  grads.input = Tensor(input.shape, 0.0);
  std::size_t h = input.dim(1), w = input.dim(2);
  for (std::size_t c = 0; c < c_in; ++c) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        grads.input.at3(c, i, j) = grad_padded.at3(c, i + d.pad_top, j + d.pad_left);
      }
    }
  }
  return grads;
}

Tensor relu_forward(const Tensor& x) {
  Tensor out(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_out) {
  check_same_shape(x, grad_out, "relu_backward");
  Tensor out(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? grad_out[i] : 0.0;
  return out;
}

PoolResult max_pool_forward(const Tensor& input, const PoolGeometry& geom, std::size_t out_h,
                            std::size_t out_w) {
  if (input.rank() != 3) {
    throw DimensionError("max_pool: input must be rank 3 [channels, H, W], got " +
                         input.shape_str());
  }
  if (geom.window_h == 0 || geom.window_w == 0) {
    throw GeometryError("max_pool: pooling windows must be positive");
  }
  std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (geom.kind == PoolGeometry::Kind::kFixed) {
    if (geom.window_h > h || geom.window_w > w) {
      throw GeometryError("max_pool: fixed window " + std::to_string(geom.window_h) + "x" +
                          std::to_string(geom.window_w) + " larger than input " +
                          std::to_string(h) + "x" + std::to_string(w));
    }
    std::size_t gh = (h + geom.window_h - 1) / geom.window_h;
    std::size_t gw = (w + geom.window_w - 1) / geom.window_w;
    if ((out_h != 0 && out_h != gh) || (out_w != 0 && out_w != gw)) {
      throw DimensionError("max_pool: fixed-mode output grid is derived from the window");
    }
    out_h = gh;
    out_w = gw;
  } else {
    if (out_h == 0 || out_w == 0) {
      throw ConfigError("max_pool: dynamic pooling requires the caller's output grid size");
    }
  }

  PoolResult res;
  res.output = Tensor({c, out_h, out_w});
  res.indices.input_shape = input.shape;
  res.indices.output_shape = res.output.shape;
  res.indices.argmax.resize(res.output.size());

  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < out_h; ++i) {
      // A window starting past the last row re-reads the last row; otherwise
      // it is truncated at the edge.
      std::size_t rs = std::min(i * geom.window_h, h - 1);
      std::size_t re = std::max(std::min(i * geom.window_h + geom.window_h, h), rs + 1);
      for (std::size_t j = 0; j < out_w; ++j) {
        std::size_t cs = std::min(j * geom.window_w, w - 1);
        std::size_t ce = std::max(std::min(j * geom.window_w + geom.window_w, w), cs + 1);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t s = rs; s < re; ++s) {
          for (std::size_t t = cs; t < ce; ++t) {
            double v = input.at3(ch, s, t);
            if (v > best) {  // strict: first occurrence wins ties
              best = v;
              best_idx = (ch * h + s) * w + t;
            }
          }
        }
        res.output.at3(ch, i, j) = best;
        res.indices.argmax[(ch * out_h + i) * out_w + j] = best_idx;
      }
    }
  }
  return res;
}

Tensor max_pool_backward(const PoolIndices& indices, const Tensor& grad_out) {
  if (grad_out.shape != indices.output_shape) {
    std::string expect = "[";
    for (std::size_t i = 0; i < indices.output_shape.size(); ++i) {
      if (i) expect += ", ";
      expect += std::to_string(indices.output_shape[i]);
    }
    expect += "]";
    throw DimensionError("max_pool_backward: grad_out shape " + grad_out.shape_str() +
                         " does not match recorded output shape " + expect);
  }
  Tensor grad_in(indices.input_shape, 0.0);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    std::size_t idx = indices.argmax[i];
    if (idx >= grad_in.size()) {
      throw DimensionError("max_pool_backward: stale argmax index " + std::to_string(idx));
    }
    grad_in[idx] += grad_out[i];
  }
  return grad_in;
}

void LinearLayerParams::validate() const {
  if (weight.rank() != 2) {
    throw DimensionError("linear params: weight must be rank 2, got " + weight.shape_str());
  }
  if (bias.size() != weight.dim(0)) {
    throw DimensionError("linear params: bias length " + std::to_string(bias.size()) +
                         " != out_dim " + std::to_string(weight.dim(0)));
  }
}

std::vector<double> linear_forward(const std::vector<double>& z, const LinearLayerParams& params) {
  params.validate();
  if (z.size() != params.in_dim()) {
    throw DimensionError("linear: input length " + std::to_string(z.size()) + " != in_dim " +
                         std::to_string(params.in_dim()));
  }
  std::size_t out = params.out_dim(), in = params.in_dim();
  std::vector<double> y(out);
  for (std::size_t o = 0; o < out; ++o) {
    double acc = 0.0;
    const double* row = &params.weight.at2(o, 0);
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * z[i];
    y[o] = acc + params.bias[o];
  }
  return y;
}

LinearGrads linear_backward(const std::vector<double>& z, const LinearLayerParams& params,
                            const std::vector<double>& grad_out) {
  params.validate();
  if (z.size() != params.in_dim()) {
    throw DimensionError("linear_backward: input length " + std::to_string(z.size()) +
                         " != in_dim " + std::to_string(params.in_dim()));
  }
  if (grad_out.size() != params.out_dim()) {
    throw DimensionError("linear_backward: grad_out length " + std::to_string(grad_out.size()) +
                         " != out_dim " + std::to_string(params.out_dim()));
  }
  std::size_t out = params.out_dim(), in = params.in_dim();
  LinearGrads g;
  g.weight = zeros_like(params.weight);
  g.bias = grad_out;
  g.input.assign(in, 0.0);
  for (std::size_t o = 0; o < out; ++o) {
    double go = grad_out[o];
    double* wg = &g.weight.at2(o, 0);
    const double* w = &params.weight.at2(o, 0);
    for (std::size_t i = 0; i < in; ++i) {
      wg[i] += go * z[i];
      g.input[i] += go * w[i];
    }
  }
  return g;
}

SoftmaxCeResult softmax_cross_entropy(const std::array<double, 2>& scores, int label) {
  if (label != 0 && label != 1) {
    throw InputError("softmax_cross_entropy: label must be 0 or 1, got " + std::to_string(label));
  }
  double m = std::max(scores[0], scores[1]);
  double e0 = std::exp(scores[0] - m);
  double e1 = std::exp(scores[1] - m);
  double z = e0 + e1;
  SoftmaxCeResult r;
  r.probs = {e0 / z, e1 / z};
  // log p computed from the shifted scores directly for stability
  double log_p = (label == 0 ? scores[0] : scores[1]) - m - std::log(z);
  r.loss = -log_p;
  r.grad_scores = {r.probs[0], r.probs[1]};
  r.grad_scores[static_cast<std::size_t>(label)] -= 1.0;
  return r;
}

DropoutResult dropout(const Tensor& x, double rate, bool training, Rng* rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout: rate must satisfy 0 <= rate < 1, got " + std::to_string(rate));
  }
  DropoutResult r;
  r.mask.assign(x.size(), 1.0);
  if (!training || rate == 0.0) {
    r.output = x;
    return r;
  }
  if (rng == nullptr) throw InputError("dropout: training mode with rate > 0 requires an rng");
  r.output = Tensor(x.shape);
  double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = (rng->uniform() >= rate) ? keep_scale : 0.0;
    r.mask[i] = m;
    r.output[i] = x[i] * m;
  }
  return r;
}

}  // namespace mp
