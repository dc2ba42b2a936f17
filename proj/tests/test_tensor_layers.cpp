#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "mp/errors.hpp"
#include "mp/gradcheck.hpp"
#include "mp/layers.hpp"
#include "mp/rng.hpp"
#include "mp/tensor.hpp"
#include "testutil.hpp"

using namespace mp;

TEST_CASE("tensor construction and indexing") {
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK(t.dim(1) == 3);
  CHECK(t.shape_str() == "[2, 3]");
  t.at2(1, 2) = 7.0;
  CHECK(t.data[5] == 7.0);

  Tensor u({2, 3, 4});
  u.at3(1, 2, 3) = 9.0;
  CHECK(u.data[1 * 12 + 2 * 4 + 3] == 9.0);

  Tensor v({2, 2, 2, 2});
  v.at4(1, 0, 1, 0) = 3.0;
  CHECK(v.data[8 + 0 + 2 + 0] == 3.0);

  CHECK_THROWS_AS(Tensor({2, 0, 3}), DimensionError);
  CHECK_THROWS_AS(t.dim(5), DimensionError);

  t.fill(0.0);
  CHECK(t.all_finite());
  t.data[0] = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("rng determinism and ranges") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 200; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.uniform() != c.uniform());

  Rng r(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 500; ++i) {
    std::uint64_t v = r.uniform_int(10);
    CHECK(v < 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);

  for (int i = 0; i < 100; ++i) CHECK(std::isfinite(r.gaussian()));

  std::vector<int> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  Rng s(99);
  s.shuffle(perm);
  std::set<int> uniq(perm.begin(), perm.end());
  CHECK(uniq.size() == 50);

  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
}

TEST_CASE("conv2d forward hand examples") {
  // 1x1 kernel of value 2 scales every element.
  Tensor ones({1, 3, 3}, 1.0);
  ConvLayerParams scale;
  scale.kernels = Tensor({1, 1, 1, 1});
  scale.kernels[0] = 2.0;
  scale.bias = {0.0};
  Tensor out = conv2d_forward(ones, scale, Padding::kSame);
  CHECK(out.shape == std::vector<std::size_t>{1, 3, 3});
  for (double v : out.data) CHECK(v == 2.0);

  // Full-window all-ones kernel sums the input.
  Tensor x({1, 2, 2});
  x.data = {1, 2, 3, 4};
  ConvLayerParams sum;
  sum.kernels = Tensor({1, 1, 2, 2}, 1.0);
  sum.bias = {0.0};
  Tensor y = conv2d_forward(x, sum, Padding::kValid);
  CHECK(y.shape == std::vector<std::size_t>{1, 1, 1});
  CHECK(y[0] == 10.0);

  sum.bias = {0.5};
  CHECK(conv2d_forward(x, sum, Padding::kValid)[0] == 10.5);
}

TEST_CASE("conv2d forward equals the naive oracle bitwise") {
  Rng rng(42);
  Tensor input = testutil::random_tensor({2, 6, 6}, rng);
  ConvLayerParams p = testutil::random_conv(3, 2, 3, rng);
  for (Padding pad : {Padding::kSame, Padding::kValid}) {
    Tensor fast = conv2d_forward(input, p, pad);
    Tensor slow = testutil::naive_conv2d(input, p, pad);
    REQUIRE(fast.shape == slow.shape);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
  }

  // Randomized sweep over small geometries, both padding modes.
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t c_in = 1 + rng.uniform_int(3);
    std::size_t c_out = 1 + rng.uniform_int(3);
    std::size_t h = 1 + rng.uniform_int(8);
    std::size_t w = 1 + rng.uniform_int(8);
    std::size_t r = 1 + rng.uniform_int(std::min({h, w, std::size_t{5}}));
    Padding pad = (rng.uniform() < 0.5) ? Padding::kSame : Padding::kValid;
    Tensor in = testutil::random_tensor({c_in, h, w}, rng);
    ConvLayerParams cp = testutil::random_conv(c_out, c_in, r, rng);
    Tensor fast = conv2d_forward(in, cp, pad);
    Tensor slow = testutil::naive_conv2d(in, cp, pad);
    REQUIRE(fast.shape == slow.shape);
    for (std::size_t i = 0; i < fast.size(); ++i) REQUIRE(fast[i] == slow[i]);
  }
}

TEST_CASE("conv2d shape errors name the problem") {
  Rng rng(1);
  Tensor input = testutil::random_tensor({2, 4, 4}, rng);
  ConvLayerParams p = testutil::random_conv(1, 3, 3, rng);  // wrong in_maps
  CHECK_THROWS_AS(conv2d_forward(input, p, Padding::kSame), DimensionError);

  ConvLayerParams big = testutil::random_conv(1, 2, 5, rng);
  CHECK_THROWS_AS(conv2d_forward(input, big, Padding::kValid), DimensionError);

  ConvLayerParams bad_bias = testutil::random_conv(2, 2, 3, rng);
  bad_bias.bias.pop_back();
  CHECK_THROWS_AS(conv2d_forward(input, bad_bias, Padding::kSame), DimensionError);
}

TEST_CASE("conv2d backward: zero grad and linear case") {
  Rng rng(5);
  Tensor input = testutil::random_tensor({2, 4, 5}, rng);
  ConvLayerParams p = testutil::random_conv(3, 2, 3, rng);
  Tensor out = conv2d_forward(input, p, Padding::kSame);

  ConvGrads g = conv2d_backward(input, p, zeros_like(out), Padding::kSame);
  for (double v : g.input.data) CHECK(v == 0.0);
  for (double v : g.kernels.data) CHECK(v == 0.0);
  for (double v : g.bias) CHECK(v == 0.0);

  // 1x1 kernel: grad_kernel is the inner product of grad_out with the input.
  Tensor x = testutil::random_tensor({1, 3, 3}, rng);
  ConvLayerParams unit = testutil::random_conv(1, 1, 1, rng);
  Tensor go = testutil::random_tensor({1, 3, 3}, rng);
  ConvGrads ug = conv2d_backward(x, unit, go, Padding::kSame);
  double expect = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) expect += go[i] * x[i];
  CHECK(ug.kernels[0] == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(conv2d_backward(input, p, Tensor({3, 9, 9}), Padding::kSame), DimensionError);
}

namespace {

// Central-difference derivative of `loss` with respect to *x.
double central_diff(double* x, const std::function<double()>& loss, double eps = 1e-6) {
  double keep = *x;
  *x = keep + eps;
  double up = loss();
  *x = keep - eps;
  double down = loss();
  *x = keep;
  return (up - down) / (2.0 * eps);
}

double rel_err(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

}  // namespace

TEST_CASE("conv2d backward matches finite differences") {
  Rng rng(11);
  Tensor input = testutil::random_tensor({2, 5, 6}, rng);
  ConvLayerParams p = testutil::random_conv(3, 2, 3, rng);
  for (Padding pad : {Padding::kSame, Padding::kValid}) {
    Tensor go = testutil::random_tensor(conv2d_forward(input, p, pad).shape, rng);
    auto loss = [&]() {
      Tensor out = conv2d_forward(input, p, pad);
      double l = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) l += go[i] * out[i];
      return l;
    };
    ConvGrads g = conv2d_backward(input, p, go, pad);
    for (std::size_t i = 0; i < p.kernels.size(); i += 7) {
      CHECK(rel_err(g.kernels[i], central_diff(&p.kernels.data[i], loss)) < 1e-6);
    }
    for (std::size_t i = 0; i < p.bias.size(); ++i) {
      CHECK(rel_err(g.bias[i], central_diff(&p.bias[i], loss)) < 1e-6);
    }
    for (std::size_t i = 0; i < input.size(); i += 11) {
      CHECK(rel_err(g.input[i], central_diff(&input.data[i], loss)) < 1e-6);
    }
  }
}

TEST_CASE("relu forward and backward") {
  Tensor x({3});
  x.data = {-1.0, 0.0, 2.0};
  Tensor y = relu_forward(x);
  CHECK(y.data == std::vector<double>{0.0, 0.0, 2.0});

  Tensor pos({4}, 3.5);
  CHECK(relu_forward(pos).data == pos.data);

  Tensor go({3}, 1.0);
  Tensor gi = relu_backward(x, go);
  CHECK(gi.data == std::vector<double>{0.0, 0.0, 1.0});  // subgradient at 0 is 0

  Rng rng(3);
  Tensor rx = testutil::random_tensor({2, 3, 3}, rng);
  for (double& v : rx.data) {
    if (std::abs(v) < 0.1) v = 0.5;  // keep clear of the kink
  }
  Tensor rgo = testutil::random_tensor({2, 3, 3}, rng);
  auto loss = [&]() {
    Tensor out = relu_forward(rx);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) l += rgo[i] * out[i];
    return l;
  };
  Tensor rgi = relu_backward(rx, rgo);
  for (std::size_t i = 0; i < rx.size(); ++i) {
    CHECK(rel_err(rgi[i], central_diff(&rx.data[i], loss)) < 1e-6);
  }
}

TEST_CASE("fixed max pooling examples") {
  Tensor x({1, 4, 4});
  for (std::size_t i = 0; i < 16; ++i) x[i] = static_cast<double>(i);
  PoolGeometry g{2, 2, PoolGeometry::Kind::kFixed};
  PoolResult r = max_pool_forward(x, g);
  CHECK(r.output.shape == std::vector<std::size_t>{1, 2, 2});
  CHECK(r.output.data == std::vector<double>{5, 7, 13, 15});
  CHECK(r.indices.argmax == std::vector<std::size_t>{5, 7, 13, 15});

  // Ties break to the first cell in row-major order.
  Tensor c({1, 4, 4}, 1.0);
  PoolResult rc = max_pool_forward(c, g);
  for (double v : rc.output.data) CHECK(v == 1.0);
  CHECK(rc.indices.argmax == std::vector<std::size_t>{0, 2, 8, 10});

  // 7 rows with window 2: four windows, the last covering a single row.
  Tensor tall({1, 7, 2});
  for (std::size_t i = 0; i < tall.size(); ++i) tall[i] = static_cast<double>(i);
  PoolResult rt = max_pool_forward(tall, PoolGeometry{2, 2, PoolGeometry::Kind::kFixed});
  CHECK(rt.output.shape == std::vector<std::size_t>{1, 4, 1});
  CHECK(rt.output.data == std::vector<double>{3, 7, 11, 13});

  CHECK_THROWS_AS(max_pool_forward(x, PoolGeometry{5, 2, PoolGeometry::Kind::kFixed}),
                  GeometryError);
}

TEST_CASE("dynamic max pooling fills the requested grid") {
  // Short input: trailing windows re-read the last row/column.
  Tensor x({1, 3, 2});
  x.data = {1, 2, 3, 4, 5, 6};
  PoolGeometry g{1, 1, PoolGeometry::Kind::kDynamic};
  PoolResult r = max_pool_forward(x, g, 5, 4);
  CHECK(r.output.shape == std::vector<std::size_t>{1, 5, 4});
  for (std::size_t i = 0; i < 5; ++i) {
    std::size_t row = std::min<std::size_t>(i, 2);
    for (std::size_t j = 0; j < 4; ++j) {
      std::size_t col = std::min<std::size_t>(j, 1);
      CHECK(r.output.at3(0, i, j) == x.at3(0, row, col));
    }
  }

  // Truncated trailing window: 7 rows onto a 4-cell grid with window 2.
  Tensor tall({1, 7, 1});
  for (std::size_t i = 0; i < 7; ++i) tall[i] = static_cast<double>(6 - i);
  PoolResult rt = max_pool_forward(tall, PoolGeometry{2, 1, PoolGeometry::Kind::kDynamic}, 4, 1);
  CHECK(rt.output.data == std::vector<double>{6, 4, 2, 0});  // max of {0,1},{2,3},{4,5},{6}

  CHECK_THROWS_AS(max_pool_forward(x, g), ConfigError);  // grid size required
}

TEST_CASE("max pool backward routes gradient to argmax") {
  Tensor x({1, 4, 4});
  for (std::size_t i = 0; i < 16; ++i) x[i] = static_cast<double>(i);
  PoolResult r = max_pool_forward(x, PoolGeometry{2, 2, PoolGeometry::Kind::kFixed});

  Tensor gi = max_pool_backward(r.indices, zeros_like(r.output));
  for (double v : gi.data) CHECK(v == 0.0);

  Tensor go({1, 2, 2});
  go.data = {1, 10, 100, 1000};
  Tensor gi2 = max_pool_backward(r.indices, go);
  CHECK(gi2[5] == 1.0);
  CHECK(gi2[7] == 10.0);
  CHECK(gi2[13] == 100.0);
  CHECK(gi2[15] == 1000.0);
  double mass_in = 0.0, mass_out = 0.0;
  for (double v : gi2.data) mass_in += v;
  for (double v : go.data) mass_out += v;
  CHECK(mass_in == mass_out);  // disjoint windows conserve gradient mass

  CHECK_THROWS_AS(max_pool_backward(r.indices, Tensor({1, 3, 3})), DimensionError);

  // Overlapping reads (dynamic re-read of the last row) accumulate additively.
  Tensor tiny({1, 1, 1}, 2.0);
  PoolResult rd = max_pool_forward(tiny, PoolGeometry{1, 1, PoolGeometry::Kind::kDynamic}, 3, 1);
  Tensor god({1, 3, 1}, 1.0);
  Tensor gid = max_pool_backward(rd.indices, god);
  CHECK(gid[0] == 3.0);
}

TEST_CASE("max pool backward matches finite differences away from ties") {
  Rng rng(17);
  Tensor x = testutil::random_tensor({2, 6, 5}, rng);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 1e-3 * static_cast<double>(i);
  PoolGeometry g{2, 2, PoolGeometry::Kind::kFixed};
  Tensor go = testutil::random_tensor(max_pool_forward(x, g).output.shape, rng);
  auto loss = [&]() {
    PoolResult r = max_pool_forward(x, g);
    double l = 0.0;
    for (std::size_t i = 0; i < r.output.size(); ++i) l += go[i] * r.output[i];
    return l;
  };
  Tensor gi = max_pool_backward(max_pool_forward(x, g).indices, go);
  for (std::size_t i = 0; i < x.size(); i += 3) {
    CHECK(rel_err(gi[i], central_diff(&x.data[i], loss)) < 1e-6);
  }
}

TEST_CASE("linear layer forward and backward") {
  LinearLayerParams id;
  id.weight = Tensor({3, 3});
  for (std::size_t i = 0; i < 3; ++i) id.weight.at2(i, i) = 1.0;
  id.bias = {0, 0, 0};
  std::vector<double> z = {4, 5, 6};
  CHECK(linear_forward(z, id) == z);

  LinearLayerParams p;
  p.weight = Tensor({1, 2});
  p.weight.data = {1, 1};
  p.bias = {1};
  CHECK(linear_forward({2, 3}, p) == std::vector<double>{6});

  CHECK_THROWS_AS(linear_forward({1, 2, 3}, p), DimensionError);

  Rng rng(23);
  LinearLayerParams rp;
  rp.weight = testutil::random_tensor({4, 6}, rng);
  rp.bias.resize(4);
  for (double& b : rp.bias) b = rng.uniform(-1, 1);
  std::vector<double> rz(6);
  for (double& v : rz) v = rng.uniform(-1, 1);
  std::vector<double> rg(4);
  for (double& v : rg) v = rng.uniform(-1, 1);

  auto loss = [&]() {
    std::vector<double> out = linear_forward(rz, rp);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) l += rg[i] * out[i];
    return l;
  };
  LinearGrads g = linear_backward(rz, rp, rg);
  for (std::size_t i = 0; i < rp.weight.size(); ++i) {
    CHECK(rel_err(g.weight[i], central_diff(&rp.weight.data[i], loss)) < 1e-7);
  }
  for (std::size_t i = 0; i < rp.bias.size(); ++i) {
    CHECK(rel_err(g.bias[i], central_diff(&rp.bias[i], loss)) < 1e-7);
  }
  for (std::size_t i = 0; i < rz.size(); ++i) {
    CHECK(rel_err(g.input[i], central_diff(&rz[i], loss)) < 1e-7);
  }
}

TEST_CASE("softmax cross entropy") {
  SoftmaxCeResult even = softmax_cross_entropy({1.7, 1.7}, 0);
  CHECK(even.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(even.probs[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(even.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Loss decreases monotonically as the true-class margin grows.
  double prev = softmax_cross_entropy({0.0, 0.0}, 1).loss;
  for (double s = 0.5; s < 10.0; s += 0.5) {
    double cur = softmax_cross_entropy({0.0, s}, 1).loss;
    CHECK(cur < prev);
    prev = cur;
  }

  SoftmaxCeResult r = softmax_cross_entropy({1.0, 3.0}, 1);
  double p1 = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(r.probs[1] == doctest::Approx(p1).epsilon(1e-14));
  CHECK(r.loss == doctest::Approx(-std::log(p1)).epsilon(1e-14));
  CHECK(r.grad_scores[0] == doctest::Approx(1.0 - p1).epsilon(1e-14));
  CHECK(r.grad_scores[1] == doctest::Approx(p1 - 1.0).epsilon(1e-14));

  // Extreme scores stay finite thanks to max-subtraction.
  SoftmaxCeResult big = softmax_cross_entropy({1000.0, -1000.0}, 0);
  CHECK(big.loss == 0.0);
  CHECK(big.probs[0] == 1.0);

  CHECK_THROWS_AS(softmax_cross_entropy({0.0, 0.0}, 2), InputError);
}

TEST_CASE("dropout modes and statistics") {
  Rng rng(31);
  Tensor x({5}, 2.0);

  DropoutResult eval = dropout(x, 0.7, false, nullptr);
  CHECK(eval.output.data == x.data);
  for (double m : eval.mask) CHECK(m == 1.0);

  DropoutResult zero = dropout(x, 0.0, true, nullptr);  // rate 0 draws nothing
  CHECK(zero.output.data == x.data);

  CHECK_THROWS_AS(dropout(x, 1.0, true, &rng), ConfigError);
  CHECK_THROWS_AS(dropout(x, -0.1, true, &rng), ConfigError);
  CHECK_THROWS_AS(dropout(x, 0.5, true, nullptr), InputError);

  Tensor big({100000}, 1.0);
  DropoutResult d = dropout(big, 0.5, true, &rng);
  std::size_t survivors = 0;
  double mean = 0.0;
  for (std::size_t i = 0; i < big.size(); ++i) {
    CHECK((d.mask[i] == 0.0 || d.mask[i] == 2.0));
    survivors += (d.mask[i] != 0.0);
    mean += d.output[i];
  }
  mean /= static_cast<double>(big.size());
  double frac = static_cast<double>(survivors) / static_cast<double>(big.size());
  CHECK(frac > 0.49);
  CHECK(frac < 0.51);
  CHECK(std::abs(mean - 1.0) < 0.02);  // inverted scaling preserves the mean
}

TEST_CASE("grad_check validates analytic gradients") {
  // Linear layer alone: tiny error.
  Rng rng(41);
  LinearLayerParams p;
  p.weight = testutil::random_tensor({3, 4}, rng);
  p.bias = {0.1, -0.2, 0.3};
  std::vector<double> z = {0.5, -0.4, 0.3, 0.2};
  std::vector<double> coeff = {1.0, -2.0, 0.5};

  auto loss = [&]() {
    std::vector<double> out = linear_forward(z, p);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) l += coeff[i] * out[i];
    return l;
  };
  LinearGrads g = linear_backward(z, p, coeff);
  std::vector<GradCheckGroup> groups;
  groups.push_back({"weight", p.weight.data.data(), p.weight.size(), g.weight.data.data(), {}});
  groups.push_back({"bias", p.bias.data(), p.bias.size(), g.bias.data(), {}});
  Rng check_rng(1);
  GradCheckReport rep = grad_check(loss, groups, 1e-6, 50, check_rng);
  CHECK(rep.max_rel_error < 1e-7);
  CHECK(rep.per_group.size() == 2);

  // Zero parameter groups report zero error by convention.
  Rng r2(2);
  GradCheckReport empty = grad_check(loss, {}, 1e-6, 10, r2);
  CHECK(empty.max_rel_error == 0.0);

  // A wrong gradient must be caught.
  std::vector<double> wrong(p.weight.size());
  for (std::size_t i = 0; i < wrong.size(); ++i) wrong[i] = 2.0 * g.weight[i] + 0.1;
  std::vector<GradCheckGroup> bad;
  bad.push_back({"weight", p.weight.data.data(), p.weight.size(), wrong.data(), {}});
  Rng r3(3);
  CHECK(grad_check(loss, bad, 1e-6, 20, r3).max_rel_error > 1e-2);
}

TEST_CASE("hand-planted diagonal kernel prefers diagonal structure") {
  // A kernel with ones on its main diagonal responds maximally to an aligned
  // diagonal run of ones, strictly more than to the same mass scattered.
  ConvLayerParams diag;
  diag.kernels = Tensor({1, 1, 5, 5});
  for (std::size_t i = 0; i < 5; ++i) diag.kernels.at4(0, 0, i, i) = 1.0;
  diag.bias = {0.0};

  Tensor with_diag({1, 12, 12}, 0.0);
  for (std::size_t i = 0; i < 5; ++i) with_diag.at3(0, 3 + i, 3 + i) = 1.0;

  Tensor scattered({1, 12, 12}, 0.0);
  scattered.at3(0, 0, 7) = 1.0;
  scattered.at3(0, 4, 1) = 1.0;
  scattered.at3(0, 6, 10) = 1.0;
  scattered.at3(0, 9, 2) = 1.0;
  scattered.at3(0, 11, 5) = 1.0;

  auto max_response = [&](const Tensor& img) {
    Tensor out = conv2d_forward(img, diag, Padding::kSame);
    double best = out[0];
    for (double v : out.data) best = std::max(best, v);
    return best;
  };
  CHECK(max_response(with_diag) == 5.0);
  CHECK(max_response(with_diag) > max_response(scattered));
}
