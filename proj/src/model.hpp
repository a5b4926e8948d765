#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grid.hpp"
#include "layers.hpp"

namespace ldc {

// Named parameter tensor with its gradient buffer and Adam moments.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
};

// Ordered collection of parameters. Group membership is carried by the name
// prefix: "extractor.", "conf.", "thr." (binarization branch), "scale.".
class ParamStore {
 public:
  Param& add(const std::string& name, std::vector<uint32_t> dims);
  Param& get(const std::string& name);
  const Param& get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  size_t total_values() const;

  void zero_grads();
  int64_t step_count() const { return step_; }

  friend void adam_step(ParamStore& ps, const std::function<double(const std::string&)>& lr_of,
                        double beta1, double beta2, double eps);

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, size_t> index_;
  int64_t step_ = 0;
};

// Bias-corrected Adam update, applied in place; the step counter increments
// once per call. Throws NumericError (with the tensor name) on NaN gradients.
void adam_step(ParamStore& ps, const std::function<double(const std::string&)>& lr_of,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
void adam_step(ParamStore& ps, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

// Polynomial decay, exponent 0.9; clamps to 0 past the last iteration.
double poly_lr(double base, uint64_t iteration, uint64_t total);

struct ModelConfig {
  uint32_t in_channels = 1;
  // Extractor strides are fixed at {1, 2, 1, 2, 1}; widths are configurable.
  std::array<uint32_t, 5> extractor_widths{8, 16, 16, 32, 32};
  // Confidence head: 1x1 -> deconv -> 3x3 -> deconv -> 1x1 (all + ReLU).
  std::array<uint32_t, 3> conf_widths{32, 16, 8};
  // Threshold learner: three 3x3 reducers, nearest x4 upsample, 3x3, 9x9 avg
  // pool, 1x1, 9x9 avg pool. The final layer is linear; the clip activation
  // in the binarization module is the output nonlinearity.
  std::array<uint32_t, 3> thr_widths{16, 8, 4};
  // Scale head: dilated bottleneck residual blocks then two deconvs.
  uint32_t scale_mid = 16;
  uint32_t scale_deconv_mid = 8;
  std::vector<uint32_t> dilations{2, 3, 4, 5};
  uint32_t threshold_window = 9;
  uint64_t seed = 0;

  void validate() const;
};

struct ForwardResult {
  Grid conf;     // non-negative, full resolution
  Grid thr_raw;  // pre-activation threshold map, full resolution
  Grid scale;    // full resolution, linear output
};

// Intermediates retained for the backward pass of one forward call. Callers
// own the cache, so a shared read-only network stays reentrant.
struct ForwardCache {
  std::vector<Tensor3> ex_in, ex_out;
  std::vector<Tensor3> conf_in, conf_out;
  Grid gate;  // D(conf, 1/4); treated as a constant in backward
  Tensor3 feat_filter;
  std::vector<Tensor3> thr_in, thr_out;
  std::vector<Tensor3> scale_in, scale_out;     // per residual block: reduce/dilated/expand ins+outs
  std::vector<Tensor3> scale_tail_in, scale_tail_out;
};

// The whole convolutional model: extractor, confidence predictor, attention
// filter, threshold learner and scale predictor, with exact hand-written
// gradients for every layer. The hard binarization itself lives in
// binarize.hpp; this class produces its two inputs.
class Network {
 public:
  Network(const ModelConfig& cfg, ParamStore store);

  // He-initialized parameters (seeded, biases zero).
  static Network create(const ModelConfig& cfg);

  ForwardResult forward(const Tensor3& image, ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients for the upstream maps produced by
  // forward(). d_thr_raw is the gradient at the pre-activation threshold map
  // (i.e. after the clip-activation chain rule has been applied).
  void backward(const ForwardCache& cache, const Grid& d_conf, const Grid& d_thr_raw,
                const Grid& d_scale);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

 private:
  ModelConfig cfg_;
  ParamStore store_;
};

// Checkpoint container "LDCP v1": magic, version byte, u32 tensor count, then
// per tensor: u32 name length, name bytes, u32 rank, u32 dims, doubles (LE).
// The model config rides along as reserved "cfg.*" tensors.
void save_checkpoint(const std::string& path, const Network& net);
Network load_checkpoint(const std::string& path);

}  // namespace ldc
