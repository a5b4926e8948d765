#pragma once

#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace ldc {

// Rank-n double tensor used for weights, biases and their gradients.
struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<uint32_t> d) : dims(std::move(d)) {
    size_t n = 1;
    for (uint32_t x : dims) n *= x;
    v.assign(n, 0.0);
  }
  size_t size() const { return v.size(); }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// 2D cross-correlation with zero padding chosen so that stride-1 output keeps
// the input size (kernel must be odd). Weights are [out_c, in_c, k, k], bias
// [out_c]; stride is 1 or 2.
Tensor3 conv2d(const Tensor3& x, const Tensor& w, const Tensor& b, uint32_t stride = 1,
               uint32_t dilation = 1);

// Exact gradients for conv2d. Any of gx/gw/gb may be null; gw/gb accumulate.
void conv2d_backward(const Tensor3& x, const Tensor& w, uint32_t stride, uint32_t dilation,
                     const Tensor3& gy, Tensor3* gx, Tensor* gw, Tensor* gb);

// Transposed convolution with the only configuration the network uses:
// 2x2 kernel, stride 2 (checkerboard-free 2x upsampling). Weights are
// [in_c, out_c, 2, 2], bias [out_c]. Output is exactly 2x the input size.
Tensor3 transposed_conv2x2(const Tensor3& x, const Tensor& w, const Tensor& b);
void transposed_conv2x2_backward(const Tensor3& x, const Tensor& w, const Tensor3& gy, Tensor3* gx,
                                 Tensor* gw, Tensor* gb);

// Same-size average pooling with count-normalized partial windows at edges.
// Window must be odd.
Grid avg_pool_same(const Grid& x, uint32_t window);
Grid avg_pool_same_backward(const Grid& gy, uint32_t window);
Tensor3 avg_pool_same(const Tensor3& x, uint32_t window);
Tensor3 avg_pool_same_backward(const Tensor3& gy, uint32_t window);

Tensor3 relu(const Tensor3& x);
// ReLU gradient from the forward output (y > 0 iff x > 0).
Tensor3 relu_backward(const Tensor3& y, const Tensor3& gy);

// Nearest-neighbour upsampling by an integer factor; backward sums each
// output block back into its source cell.
Tensor3 upsample_nearest(const Tensor3& x, uint32_t factor);
Tensor3 upsample_nearest_backward(const Tensor3& gy, uint32_t factor);

// Per-pixel gate broadcast across channels: out[c] = x[c] .* gate.
Tensor3 mul_broadcast(const Tensor3& x, const Grid& gate);

}  // namespace ldc
