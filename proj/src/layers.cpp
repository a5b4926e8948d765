#include "layers.hpp"

#include <cstring>

namespace ldc {

namespace {

void check_conv_args(const Tensor3& x, const Tensor& w, const Tensor& b, uint32_t stride,
                     uint32_t dilation) {
  if (w.dims.size() != 4) throw InputError("conv2d: weights must have rank 4");
  if (w.dims[1] != x.channels)
    throw InputError("conv2d: channel mismatch (input " + std::to_string(x.channels) +
                     ", weights expect " + std::to_string(w.dims[1]) + ")");
  if (w.dims[2] != w.dims[3] || w.dims[2] % 2 == 0)
    throw InputError("conv2d: kernel must be square and odd");
  if (b.size() != w.dims[0]) throw InputError("conv2d: bias size mismatch");
  if (stride != 1 && stride != 2) throw InputError("conv2d: stride must be 1 or 2");
  if (dilation == 0) throw InputError("conv2d: dilation must be >= 1");
}

uint32_t conv_out_dim(uint32_t in, uint32_t stride) {
  // With padding p = dilation*(k-1)/2, the kernel span cancels:
  // out = floor((in - 1) / stride) + 1.
  return (in - 1) / stride + 1;
}

}  // namespace

Tensor3 conv2d(const Tensor3& x, const Tensor& w, const Tensor& b, uint32_t stride,
               uint32_t dilation) {
  check_conv_args(x, w, b, stride, dilation);
  const uint32_t oc = w.dims[0], ic = w.dims[1], k = w.dims[2];
  const int pad = static_cast<int>(dilation * (k - 1) / 2);
  const uint32_t oh = conv_out_dim(x.height, stride);
  const uint32_t ow = conv_out_dim(x.width, stride);
  Tensor3 out(oc, oh, ow);
  const int H = static_cast<int>(x.height), W = static_cast<int>(x.width);
  for (uint32_t o = 0; o < oc; ++o) {
    double* op = out.channel(o);
    const double bias = b.v[o];
    for (size_t t = 0; t < static_cast<size_t>(oh) * ow; ++t) op[t] = bias;
    for (uint32_t c = 0; c < ic; ++c) {
      const double* xp = x.channel(c);
      const double* wp = &w.v[(static_cast<size_t>(o) * ic + c) * k * k];
      for (uint32_t u = 0; u < k; ++u) {
        for (uint32_t v = 0; v < k; ++v) {
          const double wv = wp[u * k + v];
          if (wv == 0.0) continue;
          const int du = static_cast<int>(u * dilation) - pad;
          const int dv = static_cast<int>(v * dilation) - pad;
          for (uint32_t i = 0; i < oh; ++i) {
            const int si = static_cast<int>(i * stride) + du;
            if (si < 0 || si >= H) continue;
            const double* xrow = xp + static_cast<size_t>(si) * W;
            double* orow = op + static_cast<size_t>(i) * ow;
            for (uint32_t j = 0; j < ow; ++j) {
              const int sj = static_cast<int>(j * stride) + dv;
              if (sj < 0 || sj >= W) continue;
              orow[j] += wv * xrow[sj];
            }
          }
        }
      }
    }
  }
  return out;
}

void conv2d_backward(const Tensor3& x, const Tensor& w, uint32_t stride, uint32_t dilation,
                     const Tensor3& gy, Tensor3* gx, Tensor* gw, Tensor* gb) {
  const uint32_t oc = w.dims[0], ic = w.dims[1], k = w.dims[2];
  const int pad = static_cast<int>(dilation * (k - 1) / 2);
  const int H = static_cast<int>(x.height), W = static_cast<int>(x.width);
  if (gx && (gx->channels != x.channels || gx->height != x.height || gx->width != x.width))
    *gx = Tensor3(x.channels, x.height, x.width);
  for (uint32_t o = 0; o < oc; ++o) {
    const double* gp = gy.channel(o);
    if (gb) {
      double s = 0.0;
      for (size_t t = 0; t < static_cast<size_t>(gy.height) * gy.width; ++t) s += gp[t];
      gb->v[o] += s;
    }
    for (uint32_t c = 0; c < ic; ++c) {
      const double* xp = x.channel(c);
      double* gxp = gx ? gx->channel(c) : nullptr;
      const double* wp = &w.v[(static_cast<size_t>(o) * ic + c) * k * k];
      double* gwp = gw ? &gw->v[(static_cast<size_t>(o) * ic + c) * k * k] : nullptr;
      for (uint32_t u = 0; u < k; ++u) {
        for (uint32_t v = 0; v < k; ++v) {
          const int du = static_cast<int>(u * dilation) - pad;
          const int dv = static_cast<int>(v * dilation) - pad;
          const double wv = wp[u * k + v];
          double wsum = 0.0;
          for (uint32_t i = 0; i < gy.height; ++i) {
            const int si = static_cast<int>(i * stride) + du;
            if (si < 0 || si >= H) continue;
            const double* xrow = xp + static_cast<size_t>(si) * W;
            double* gxrow = gxp ? gxp + static_cast<size_t>(si) * W : nullptr;
            const double* grow = gp + static_cast<size_t>(i) * gy.width;
            for (uint32_t j = 0; j < gy.width; ++j) {
              const int sj = static_cast<int>(j * stride) + dv;
              if (sj < 0 || sj >= W) continue;
              const double g = grow[j];
              wsum += g * xrow[sj];
              if (gxrow) gxrow[sj] += g * wv;
            }
          }
          if (gwp) gwp[u * k + v] += wsum;
        }
      }
    }
  }
}

Tensor3 transposed_conv2x2(const Tensor3& x, const Tensor& w, const Tensor& b) {
  if (w.dims.size() != 4 || w.dims[2] != 2 || w.dims[3] != 2)
    throw InputError("transposed_conv2x2: only kernel 2, stride 2 is supported");
  if (w.dims[0] != x.channels) throw InputError("transposed_conv2x2: channel mismatch");
  const uint32_t ic = w.dims[0], oc = w.dims[1];
  if (b.size() != oc) throw InputError("transposed_conv2x2: bias size mismatch");
  Tensor3 out(oc, x.height * 2, x.width * 2);
  for (uint32_t o = 0; o < oc; ++o) {
    double* op = out.channel(o);
    const double bias = b.v[o];
    for (size_t t = 0; t < static_cast<size_t>(out.height) * out.width; ++t) op[t] = bias;
    for (uint32_t c = 0; c < ic; ++c) {
      const double* xp = x.channel(c);
      const double* wp = &w.v[(static_cast<size_t>(c) * oc + o) * 4];
      for (uint32_t i = 0; i < x.height; ++i) {
        const double* xrow = xp + static_cast<size_t>(i) * x.width;
        double* orow0 = op + static_cast<size_t>(2 * i) * out.width;
        double* orow1 = orow0 + out.width;
        for (uint32_t j = 0; j < x.width; ++j) {
          const double xv = xrow[j];
          orow0[2 * j] += xv * wp[0];
          orow0[2 * j + 1] += xv * wp[1];
          orow1[2 * j] += xv * wp[2];
          orow1[2 * j + 1] += xv * wp[3];
        }
      }
    }
  }
  return out;
}

void transposed_conv2x2_backward(const Tensor3& x, const Tensor& w, const Tensor3& gy, Tensor3* gx,
                                 Tensor* gw, Tensor* gb) {
  const uint32_t ic = w.dims[0], oc = w.dims[1];
  if (gx && (gx->channels != x.channels || gx->height != x.height || gx->width != x.width))
    *gx = Tensor3(x.channels, x.height, x.width);
  for (uint32_t o = 0; o < oc; ++o) {
    const double* gp = gy.channel(o);
    if (gb) {
      double s = 0.0;
      for (size_t t = 0; t < static_cast<size_t>(gy.height) * gy.width; ++t) s += gp[t];
      gb->v[o] += s;
    }
    for (uint32_t c = 0; c < ic; ++c) {
      const double* xp = x.channel(c);
      double* gxp = gx ? gx->channel(c) : nullptr;
      const double* wp = &w.v[(static_cast<size_t>(c) * oc + o) * 4];
      double* gwp = gw ? &gw->v[(static_cast<size_t>(c) * oc + o) * 4] : nullptr;
      double gw0 = 0.0, gw1 = 0.0, gw2 = 0.0, gw3 = 0.0;
      for (uint32_t i = 0; i < x.height; ++i) {
        const double* xrow = xp + static_cast<size_t>(i) * x.width;
        const double* grow0 = gp + static_cast<size_t>(2 * i) * gy.width;
        const double* grow1 = grow0 + gy.width;
        double* gxrow = gxp ? gxp + static_cast<size_t>(i) * x.width : nullptr;
        for (uint32_t j = 0; j < x.width; ++j) {
          const double g0 = grow0[2 * j], g1 = grow0[2 * j + 1];
          const double g2 = grow1[2 * j], g3 = grow1[2 * j + 1];
          const double xv = xrow[j];
          gw0 += g0 * xv;
          gw1 += g1 * xv;
          gw2 += g2 * xv;
          gw3 += g3 * xv;
          if (gxrow) gxrow[j] += g0 * wp[0] + g1 * wp[1] + g2 * wp[2] + g3 * wp[3];
        }
      }
      if (gwp) {
        gwp[0] += gw0;
        gwp[1] += gw1;
        gwp[2] += gw2;
        gwp[3] += gw3;
      }
    }
  }
}

Grid avg_pool_same(const Grid& x, uint32_t window) {
  if (window % 2 == 0) throw InputError("avg_pool_same: window must be odd");
  const int r = static_cast<int>(window / 2);
  const int H = static_cast<int>(x.height), W = static_cast<int>(x.width);
  Grid out(x.height, x.width);
  for (int i = 0; i < H; ++i) {
    const int i0 = std::max(0, i - r), i1 = std::min(H - 1, i + r);
    for (int j = 0; j < W; ++j) {
      const int j0 = std::max(0, j - r), j1 = std::min(W - 1, j + r);
      double s = 0.0;
      for (int u = i0; u <= i1; ++u)
        for (int v = j0; v <= j1; ++v) s += x.at(u, v);
      out.at(i, j) = s / ((i1 - i0 + 1) * (j1 - j0 + 1));
    }
  }
  return out;
}

Grid avg_pool_same_backward(const Grid& gy, uint32_t window) {
  if (window % 2 == 0) throw InputError("avg_pool_same_backward: window must be odd");
  const int r = static_cast<int>(window / 2);
  const int H = static_cast<int>(gy.height), W = static_cast<int>(gy.width);
  Grid gx(gy.height, gy.width);
  for (int i = 0; i < H; ++i) {
    const int i0 = std::max(0, i - r), i1 = std::min(H - 1, i + r);
    for (int j = 0; j < W; ++j) {
      const int j0 = std::max(0, j - r), j1 = std::min(W - 1, j + r);
      const double g = gy.at(i, j) / ((i1 - i0 + 1) * (j1 - j0 + 1));
      for (int u = i0; u <= i1; ++u)
        for (int v = j0; v <= j1; ++v) gx.at(u, v) += g;
    }
  }
  return gx;
}

Tensor3 avg_pool_same(const Tensor3& x, uint32_t window) {
  Tensor3 out(x.channels, x.height, x.width);
  for (uint32_t c = 0; c < x.channels; ++c) {
    Grid g = avg_pool_same(grid_from_channel(x, c), window);
    std::memcpy(out.channel(c), g.data.data(), sizeof(double) * g.size());
  }
  return out;
}

Tensor3 avg_pool_same_backward(const Tensor3& gy, uint32_t window) {
  Tensor3 out(gy.channels, gy.height, gy.width);
  for (uint32_t c = 0; c < gy.channels; ++c) {
    Grid g = avg_pool_same_backward(grid_from_channel(gy, c), window);
    std::memcpy(out.channel(c), g.data.data(), sizeof(double) * g.size());
  }
  return out;
}

Tensor3 relu(const Tensor3& x) {
  Tensor3 out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor3 relu_backward(const Tensor3& y, const Tensor3& gy) {
  Tensor3 gx = gy;
  for (size_t k = 0; k < gx.data.size(); ++k) {
    if (y.data[k] <= 0.0) gx.data[k] = 0.0;
  }
  return gx;
}

Tensor3 upsample_nearest(const Tensor3& x, uint32_t factor) {
  if (factor == 0) throw InputError("upsample_nearest: factor must be >= 1");
  Tensor3 out(x.channels, x.height * factor, x.width * factor);
  for (uint32_t c = 0; c < x.channels; ++c) {
    const double* xp = x.channel(c);
    double* op = out.channel(c);
    for (uint32_t i = 0; i < out.height; ++i) {
      const double* xrow = xp + static_cast<size_t>(i / factor) * x.width;
      double* orow = op + static_cast<size_t>(i) * out.width;
      for (uint32_t j = 0; j < out.width; ++j) orow[j] = xrow[j / factor];
    }
  }
  return out;
}

Tensor3 upsample_nearest_backward(const Tensor3& gy, uint32_t factor) {
  if (gy.height % factor != 0 || gy.width % factor != 0)
    throw InputError("upsample_nearest_backward: size not divisible by factor");
  Tensor3 gx(gy.channels, gy.height / factor, gy.width / factor);
  for (uint32_t c = 0; c < gy.channels; ++c) {
    const double* gp = gy.channel(c);
    double* xp = gx.channel(c);
    for (uint32_t i = 0; i < gy.height; ++i) {
      const double* grow = gp + static_cast<size_t>(i) * gy.width;
      double* xrow = xp + static_cast<size_t>(i / factor) * gx.width;
      for (uint32_t j = 0; j < gy.width; ++j) xrow[j / factor] += grow[j];
    }
  }
  return gx;
}

Tensor3 mul_broadcast(const Tensor3& x, const Grid& gate) {
  if (x.height != gate.height || x.width != gate.width)
    throw InputError("mul_broadcast: gate shape mismatch");
  Tensor3 out = x;
  for (uint32_t c = 0; c < x.channels; ++c) {
    double* op = out.channel(c);
    for (size_t k = 0; k < gate.size(); ++k) op[k] *= gate.data[k];
  }
  return out;
}

}  // namespace ldc
