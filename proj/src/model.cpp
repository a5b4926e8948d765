#include "model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ldc {

Param& ParamStore::add(const std::string& name, std::vector<uint32_t> dims) {
  if (index_.count(name)) throw InputError("ParamStore: duplicate parameter '" + name + "'");
  Param p;
  p.name = name;
  p.value = Tensor(dims);
  p.grad = Tensor(dims);
  p.m = Tensor(dims);
  p.v = Tensor(std::move(dims));
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back();
}

Param& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("ParamStore: unknown parameter '" + name + "'");
  return params_[it->second];
}

const Param& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("ParamStore: unknown parameter '" + name + "'");
  return params_[it->second];
}

size_t ParamStore::total_values() const {
  size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p.grad.zero();
}

void adam_step(ParamStore& ps, const std::function<double(const std::string&)>& lr_of,
               double beta1, double beta2, double eps) {
  ps.step_ += 1;
  const double t = static_cast<double>(ps.step_);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  for (auto& p : ps.params_) {
    const double lr = lr_of(p.name);
    for (size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad.v[k];
      if (std::isnan(g)) throw NumericError("adam_step: NaN gradient in '" + p.name + "'");
      p.m.v[k] = beta1 * p.m.v[k] + (1.0 - beta1) * g;
      p.v.v[k] = beta2 * p.v.v[k] + (1.0 - beta2) * g * g;
      const double mhat = p.m.v[k] / bc1;
      const double vhat = p.v.v[k] / bc2;
      p.value.v[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

void adam_step(ParamStore& ps, double lr, double beta1, double beta2, double eps) {
  adam_step(
      ps, [lr](const std::string&) { return lr; }, beta1, beta2, eps);
}

double poly_lr(double base, uint64_t iteration, uint64_t total) {
  if (total == 0) throw InputError("poly_lr: total iterations must be >= 1");
  if (iteration >= total) return 0.0;
  const double frac = 1.0 - static_cast<double>(iteration) / static_cast<double>(total);
  return base * std::pow(frac, 0.9);
}

void ModelConfig::validate() const {
  if (in_channels != 1 && in_channels != 3)
    throw InputError("ModelConfig: in_channels must be 1 or 3");
  for (uint32_t w : extractor_widths)
    if (w == 0) throw InputError("ModelConfig: zero extractor width");
  for (uint32_t w : conf_widths)
    if (w == 0) throw InputError("ModelConfig: zero confidence-head width");
  for (uint32_t w : thr_widths)
    if (w == 0) throw InputError("ModelConfig: zero threshold-learner width");
  if (scale_mid == 0 || scale_deconv_mid == 0) throw InputError("ModelConfig: zero scale width");
  if (dilations.empty()) throw InputError("ModelConfig: dilation schedule must be non-empty");
  if (threshold_window % 2 == 0) throw InputError("ModelConfig: threshold window must be odd");
}

namespace {

constexpr std::array<uint32_t, 5> kExtractorStrides{1, 2, 1, 2, 1};

std::string block_name(size_t b, const char* part) {
  return "scale.block" + std::to_string(b + 1) + "." + part;
}

}  // namespace

Network::Network(const ModelConfig& cfg, ParamStore store) : cfg_(cfg), store_(std::move(store)) {
  cfg_.validate();
}

Network Network::create(const ModelConfig& cfg) {
  cfg.validate();
  ParamStore ps;
  const auto& ew = cfg.extractor_widths;
  uint32_t c = cfg.in_channels;
  for (size_t i = 0; i < ew.size(); ++i) {
    ps.add("extractor.conv" + std::to_string(i + 1) + ".w", {ew[i], c, 3, 3});
    ps.add("extractor.conv" + std::to_string(i + 1) + ".b", {ew[i]});
    c = ew[i];
  }
  const uint32_t fc = ew.back();
  const auto& cw = cfg.conf_widths;
  ps.add("conf.conv1.w", {cw[0], fc, 1, 1});
  ps.add("conf.conv1.b", {cw[0]});
  ps.add("conf.deconv1.w", {cw[0], cw[1], 2, 2});
  ps.add("conf.deconv1.b", {cw[1]});
  ps.add("conf.conv2.w", {cw[1], cw[1], 3, 3});
  ps.add("conf.conv2.b", {cw[1]});
  ps.add("conf.deconv2.w", {cw[1], cw[2], 2, 2});
  ps.add("conf.deconv2.b", {cw[2]});
  ps.add("conf.conv3.w", {1, cw[2], 1, 1});
  ps.add("conf.conv3.b", {1});
  const auto& tw = cfg.thr_widths;
  uint32_t tc = fc;
  for (size_t i = 0; i < tw.size(); ++i) {
    ps.add("thr.conv" + std::to_string(i + 1) + ".w", {tw[i], tc, 3, 3});
    ps.add("thr.conv" + std::to_string(i + 1) + ".b", {tw[i]});
    tc = tw[i];
  }
  ps.add("thr.conv4.w", {tw[2], tw[2], 3, 3});
  ps.add("thr.conv4.b", {tw[2]});
  ps.add("thr.conv5.w", {1, tw[2], 1, 1});
  ps.add("thr.conv5.b", {1});
  for (size_t b = 0; b < cfg.dilations.size(); ++b) {
    ps.add(block_name(b, "reduce.w"), {cfg.scale_mid, fc, 1, 1});
    ps.add(block_name(b, "reduce.b"), {cfg.scale_mid});
    ps.add(block_name(b, "dilated.w"), {cfg.scale_mid, cfg.scale_mid, 3, 3});
    ps.add(block_name(b, "dilated.b"), {cfg.scale_mid});
    ps.add(block_name(b, "expand.w"), {fc, cfg.scale_mid, 1, 1});
    ps.add(block_name(b, "expand.b"), {fc});
  }
  ps.add("scale.deconv1.w", {fc, cfg.scale_deconv_mid, 2, 2});
  ps.add("scale.deconv1.b", {cfg.scale_deconv_mid});
  ps.add("scale.deconv2.w", {cfg.scale_deconv_mid, 1, 2, 2});
  ps.add("scale.deconv2.b", {1});

  // He fan-in init for weights, zero biases. Deconv weights are [ic, oc, k, k]
  // so the fan-in there is ic*k*k as well.
  Rng rng(cfg.seed);
  for (auto& p : ps.params()) {
    if (p.name.size() > 2 && p.name.compare(p.name.size() - 2, 2, ".w") == 0) {
      const bool deconv = p.name.find("deconv") != std::string::npos;
      const auto& d = p.value.dims;
      const double fan_in = deconv ? static_cast<double>(d[0]) * d[2] * d[3]
                                   : static_cast<double>(d[1]) * d[2] * d[3];
      const double std = std::sqrt(2.0 / fan_in);
      for (double& v : p.value.v) v = rng.normal() * std;
    }
  }
  return Network(cfg, std::move(ps));
}

ForwardResult Network::forward(const Tensor3& image, ForwardCache* cache) const {
  if (image.channels != cfg_.in_channels)
    throw InputError("forward: expected " + std::to_string(cfg_.in_channels) +
                     " input channels, got " + std::to_string(image.channels));
  if (image.height % 4 != 0 || image.width % 4 != 0)
    throw InputError("forward: image dimensions must be divisible by 4");
  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc = ForwardCache{};

  // Feature extractor: five 3x3 convs, strides 1-2-1-2-1, ReLU each.
  Tensor3 x = image;
  for (size_t i = 0; i < 5; ++i) {
    const auto& w = store_.get("extractor.conv" + std::to_string(i + 1) + ".w").value;
    const auto& b = store_.get("extractor.conv" + std::to_string(i + 1) + ".b").value;
    cc.ex_in.push_back(x);
    x = relu(conv2d(x, w, b, kExtractorStrides[i]));
    cc.ex_out.push_back(x);
  }
  const Tensor3& feat = cc.ex_out.back();

  // Confidence predictor: 1x1, deconv, 3x3, deconv, 1x1; ReLU everywhere
  // including the output (confidence is non-negative).
  Tensor3 y = feat;
  const char* conf_ops[5] = {"conf.conv1", "conf.deconv1", "conf.conv2", "conf.deconv2",
                             "conf.conv3"};
  for (size_t i = 0; i < 5; ++i) {
    const auto& w = store_.get(std::string(conf_ops[i]) + ".w").value;
    const auto& b = store_.get(std::string(conf_ops[i]) + ".b").value;
    cc.conf_in.push_back(y);
    if (i == 1 || i == 3)
      y = relu(transposed_conv2x2(y, w, b));
    else
      y = relu(conv2d(y, w, b, 1));
    cc.conf_out.push_back(y);
  }
  Grid conf = grid_from_channel(y, 0);

  // Attention filter: gate the features with the 1/4-scale confidence. The
  // gate is a constant for gradient purposes; only the feature path trains
  // through it.
  cc.gate = downsample_avg(conf, 4);
  cc.feat_filter = mul_broadcast(feat, cc.gate);

  // Threshold learner on filtered features: three 3x3 reducers at 1/4
  // resolution, nearest x4 to full resolution, then the smoothing stage.
  Tensor3 t = cc.feat_filter;
  for (size_t i = 0; i < 3; ++i) {
    const auto& w = store_.get("thr.conv" + std::to_string(i + 1) + ".w").value;
    const auto& b = store_.get("thr.conv" + std::to_string(i + 1) + ".b").value;
    cc.thr_in.push_back(t);
    t = relu(conv2d(t, w, b, 1));
    cc.thr_out.push_back(t);
  }
  t = upsample_nearest(t, 4);
  cc.thr_in.push_back(t);
  t = relu(conv2d(t, store_.get("thr.conv4.w").value, store_.get("thr.conv4.b").value, 1));
  cc.thr_out.push_back(t);
  t = avg_pool_same(t, cfg_.threshold_window);
  cc.thr_in.push_back(t);
  t = conv2d(t, store_.get("thr.conv5.w").value, store_.get("thr.conv5.b").value, 1);
  cc.thr_out.push_back(t);
  Grid thr_raw = avg_pool_same(grid_from_channel(t, 0), cfg_.threshold_window);

  // Scale predictor: dilated residual blocks then two deconvs (last linear).
  Tensor3 s = feat;
  for (size_t bix = 0; bix < cfg_.dilations.size(); ++bix) {
    cc.scale_in.push_back(s);
    Tensor3 a = relu(conv2d(s, store_.get(block_name(bix, "reduce.w")).value,
                            store_.get(block_name(bix, "reduce.b")).value, 1));
    cc.scale_in.push_back(a);
    Tensor3 c2 = relu(conv2d(a, store_.get(block_name(bix, "dilated.w")).value,
                             store_.get(block_name(bix, "dilated.b")).value, 1,
                             cfg_.dilations[bix]));
    cc.scale_in.push_back(c2);
    Tensor3 e = conv2d(c2, store_.get(block_name(bix, "expand.w")).value,
                       store_.get(block_name(bix, "expand.b")).value, 1);
    for (size_t k = 0; k < e.data.size(); ++k) e.data[k] += s.data[k];
    s = relu(e);
    cc.scale_out.push_back(s);
  }
  cc.scale_tail_in.push_back(s);
  s = relu(transposed_conv2x2(s, store_.get("scale.deconv1.w").value,
                              store_.get("scale.deconv1.b").value));
  cc.scale_tail_in.push_back(s);
  s = transposed_conv2x2(s, store_.get("scale.deconv2.w").value,
                         store_.get("scale.deconv2.b").value);
  Grid scale = grid_from_channel(s, 0);

  check_finite(conf, "forward(conf)");
  check_finite(thr_raw, "forward(thr)");
  check_finite(scale, "forward(scale)");
  return ForwardResult{std::move(conf), std::move(thr_raw), std::move(scale)};
}

void Network::backward(const ForwardCache& cache, const Grid& d_conf, const Grid& d_thr_raw,
                       const Grid& d_scale) {
  auto& ps = store_;
  auto grads = [&](const std::string& base) {
    return std::pair<Tensor*, Tensor*>{&ps.get(base + ".w").grad, &ps.get(base + ".b").grad};
  };
  const Tensor3& feat = cache.ex_out.back();
  Tensor3 d_feat(feat.channels, feat.height, feat.width);

  // Scale head.
  {
    Tensor3 g = tensor_from_grid(d_scale);
    Tensor3 gx;
    auto [gw2, gb2] = grads("scale.deconv2");
    transposed_conv2x2_backward(cache.scale_tail_in[1], ps.get("scale.deconv2.w").value, g, &gx,
                                gw2, gb2);
    g = relu_backward(cache.scale_tail_in[1], gx);
    auto [gw1, gb1] = grads("scale.deconv1");
    Tensor3 gx1;
    transposed_conv2x2_backward(cache.scale_tail_in[0], ps.get("scale.deconv1.w").value, g, &gx1,
                                gw1, gb1);
    g = std::move(gx1);
    for (size_t bix = cfg_.dilations.size(); bix-- > 0;) {
      const Tensor3& xin = cache.scale_in[3 * bix];
      const Tensor3& a = cache.scale_in[3 * bix + 1];
      const Tensor3& c2 = cache.scale_in[3 * bix + 2];
      const Tensor3& out = cache.scale_out[bix];
      Tensor3 d_sum = relu_backward(out, g);
      Tensor3 d_c;
      auto [gwe, gbe] = grads(block_name(bix, "expand"));
      conv2d_backward(c2, ps.get(block_name(bix, "expand.w")).value, 1, 1, d_sum, &d_c, gwe, gbe);
      d_c = relu_backward(c2, d_c);
      Tensor3 d_a;
      auto [gwd, gbd] = grads(block_name(bix, "dilated"));
      conv2d_backward(a, ps.get(block_name(bix, "dilated.w")).value, 1, cfg_.dilations[bix], d_c,
                      &d_a, gwd, gbd);
      d_a = relu_backward(a, d_a);
      Tensor3 d_x;
      auto [gwr, gbr] = grads(block_name(bix, "reduce"));
      conv2d_backward(xin, ps.get(block_name(bix, "reduce.w")).value, 1, 1, d_a, &d_x, gwr, gbr);
      for (size_t k = 0; k < d_x.data.size(); ++k) d_x.data[k] += d_sum.data[k];
      g = std::move(d_x);
    }
    for (size_t k = 0; k < d_feat.data.size(); ++k) d_feat.data[k] += g.data[k];
  }

  // Threshold learner back to the filtered features, then through the
  // constant gate into the features.
  {
    Grid g5 = avg_pool_same_backward(d_thr_raw, cfg_.threshold_window);
    Tensor3 g = tensor_from_grid(g5);
    Tensor3 gx;
    auto [gw5, gb5] = grads("thr.conv5");
    conv2d_backward(cache.thr_in[4], ps.get("thr.conv5.w").value, 1, 1, g, &gx, gw5, gb5);
    gx = avg_pool_same_backward(gx, cfg_.threshold_window);
    gx = relu_backward(cache.thr_out[3], gx);
    Tensor3 gx4;
    auto [gw4, gb4] = grads("thr.conv4");
    conv2d_backward(cache.thr_in[3], ps.get("thr.conv4.w").value, 1, 1, gx, &gx4, gw4, gb4);
    Tensor3 gq = upsample_nearest_backward(gx4, 4);
    for (size_t i = 3; i-- > 0;) {
      gq = relu_backward(cache.thr_out[i], gq);
      Tensor3 gprev;
      auto [gw, gb] = grads("thr.conv" + std::to_string(i + 1));
      conv2d_backward(cache.thr_in[i], ps.get("thr.conv" + std::to_string(i + 1) + ".w").value, 1,
                      1, gq, &gprev, gw, gb);
      gq = std::move(gprev);
    }
    // d(feat_filter) -> d(feat) via the frozen gate.
    Tensor3 d_ff = mul_broadcast(gq, cache.gate);
    for (size_t k = 0; k < d_feat.data.size(); ++k) d_feat.data[k] += d_ff.data[k];
  }

  // Confidence head.
  {
    Tensor3 g = tensor_from_grid(d_conf);
    const char* conf_ops[5] = {"conf.conv1", "conf.deconv1", "conf.conv2", "conf.deconv2",
                               "conf.conv3"};
    for (size_t i = 5; i-- > 0;) {
      g = relu_backward(cache.conf_out[i], g);
      Tensor3 gprev;
      auto [gw, gb] = grads(conf_ops[i]);
      if (i == 1 || i == 3)
        transposed_conv2x2_backward(cache.conf_in[i], ps.get(std::string(conf_ops[i]) + ".w").value,
                                    g, &gprev, gw, gb);
      else
        conv2d_backward(cache.conf_in[i], ps.get(std::string(conf_ops[i]) + ".w").value, 1, 1, g,
                        &gprev, gw, gb);
      g = std::move(gprev);
    }
    for (size_t k = 0; k < d_feat.data.size(); ++k) d_feat.data[k] += g.data[k];
  }

  // Extractor.
  {
    Tensor3 g = std::move(d_feat);
    for (size_t i = 5; i-- > 0;) {
      g = relu_backward(cache.ex_out[i], g);
      Tensor3 gprev;
      auto [gw, gb] = grads("extractor.conv" + std::to_string(i + 1));
      conv2d_backward(cache.ex_in[i], ps.get("extractor.conv" + std::to_string(i + 1) + ".w").value,
                      kExtractorStrides[i], 1, g, i > 0 ? &gprev : nullptr, gw, gb);
      if (i > 0) g = std::move(gprev);
    }
  }
}

namespace {

constexpr char kCkptMagic[4] = {'L', 'D', 'C', 'P'};
constexpr uint8_t kCkptVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
  for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

uint32_t take_u32(const unsigned char* p, size_t size, size_t& off, const std::string& path) {
  if (off + 4 > size)
    throw FormatError("checkpoint: truncated at byte " + std::to_string(off) + " in '" + path + "'");
  uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<uint32_t>(p[off + k]) << (8 * k);
  off += 4;
  return v;
}

void append_tensor(std::string& buf, const std::string& name, const Tensor& t) {
  put_u32(buf, static_cast<uint32_t>(name.size()));
  buf.append(name);
  put_u32(buf, static_cast<uint32_t>(t.dims.size()));
  for (uint32_t d : t.dims) put_u32(buf, d);
  for (double v : t.v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
  }
}

Tensor vec_tensor(const std::vector<double>& vals) {
  Tensor t({static_cast<uint32_t>(vals.size())});
  t.v = vals;
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& net) {
  const ModelConfig& cfg = net.config();
  std::vector<std::pair<std::string, Tensor>> extra;
  extra.emplace_back("cfg.in_channels", vec_tensor({static_cast<double>(cfg.in_channels)}));
  extra.emplace_back("cfg.extractor_widths",
                     vec_tensor({static_cast<double>(cfg.extractor_widths[0]),
                                 static_cast<double>(cfg.extractor_widths[1]),
                                 static_cast<double>(cfg.extractor_widths[2]),
                                 static_cast<double>(cfg.extractor_widths[3]),
                                 static_cast<double>(cfg.extractor_widths[4])}));
  extra.emplace_back("cfg.conf_widths", vec_tensor({static_cast<double>(cfg.conf_widths[0]),
                                                    static_cast<double>(cfg.conf_widths[1]),
                                                    static_cast<double>(cfg.conf_widths[2])}));
  extra.emplace_back("cfg.thr_widths", vec_tensor({static_cast<double>(cfg.thr_widths[0]),
                                                   static_cast<double>(cfg.thr_widths[1]),
                                                   static_cast<double>(cfg.thr_widths[2])}));
  extra.emplace_back("cfg.scale_mid", vec_tensor({static_cast<double>(cfg.scale_mid)}));
  extra.emplace_back("cfg.scale_deconv_mid",
                     vec_tensor({static_cast<double>(cfg.scale_deconv_mid)}));
  std::vector<double> dil;
  for (uint32_t d : cfg.dilations) dil.push_back(static_cast<double>(d));
  extra.emplace_back("cfg.dilations", vec_tensor(dil));
  extra.emplace_back("cfg.threshold_window",
                     vec_tensor({static_cast<double>(cfg.threshold_window)}));
  extra.emplace_back("cfg.seed", vec_tensor({static_cast<double>(cfg.seed)}));

  std::string buf;
  buf.append(kCkptMagic, 4);
  buf.push_back(static_cast<char>(kCkptVersion));
  put_u32(buf, static_cast<uint32_t>(extra.size() + net.store().params().size()));
  for (const auto& [name, t] : extra) append_tensor(buf, name, t);
  for (const auto& p : net.store().params()) append_tensor(buf, p.name, p.value);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("save_checkpoint: cannot open '" + path + "' for writing");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("save_checkpoint: write failed for '" + path + "'");
}

Network load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_checkpoint: cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 4 || std::memcmp(buf.data(), kCkptMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic in '" + path + "'");
  if (buf.size() < 5 || p[4] != kCkptVersion)
    throw FormatError("checkpoint: unsupported version in '" + path + "'");
  size_t off = 5;
  const uint32_t count = take_u32(p, buf.size(), off, path);
  std::unordered_map<std::string, Tensor> tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = take_u32(p, buf.size(), off, path);
    if (off + name_len > buf.size())
      throw FormatError("checkpoint: truncated name at byte " + std::to_string(off));
    std::string name(buf.data() + off, name_len);
    off += name_len;
    const uint32_t rank = take_u32(p, buf.size(), off, path);
    std::vector<uint32_t> dims;
    size_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      dims.push_back(take_u32(p, buf.size(), off, path));
      n *= dims.back();
    }
    if (off + 8 * n > buf.size())
      throw FormatError("checkpoint: truncated values for '" + name + "' at byte " +
                        std::to_string(off));
    Tensor t(dims);
    for (size_t k = 0; k < n; ++k) {
      uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<uint64_t>(p[off + 8 * k + b]) << (8 * b);
      t.v[k] = std::bit_cast<double>(bits);
    }
    off += 8 * n;
    tensors.emplace(std::move(name), std::move(t));
  }
  if (off != buf.size()) throw FormatError("checkpoint: trailing bytes in '" + path + "'");

  auto cfg_vec = [&](const std::string& name) -> std::vector<double> {
    auto it = tensors.find(name);
    if (it == tensors.end())
      throw FormatError("checkpoint: missing config entry '" + name + "' in '" + path + "'");
    return it->second.v;
  };
  ModelConfig cfg;
  cfg.in_channels = static_cast<uint32_t>(cfg_vec("cfg.in_channels")[0]);
  auto ews = cfg_vec("cfg.extractor_widths");
  for (size_t i = 0; i < 5; ++i) cfg.extractor_widths[i] = static_cast<uint32_t>(ews[i]);
  auto cws = cfg_vec("cfg.conf_widths");
  for (size_t i = 0; i < 3; ++i) cfg.conf_widths[i] = static_cast<uint32_t>(cws[i]);
  auto tws = cfg_vec("cfg.thr_widths");
  for (size_t i = 0; i < 3; ++i) cfg.thr_widths[i] = static_cast<uint32_t>(tws[i]);
  cfg.scale_mid = static_cast<uint32_t>(cfg_vec("cfg.scale_mid")[0]);
  cfg.scale_deconv_mid = static_cast<uint32_t>(cfg_vec("cfg.scale_deconv_mid")[0]);
  cfg.dilations.clear();
  for (double d : cfg_vec("cfg.dilations")) cfg.dilations.push_back(static_cast<uint32_t>(d));
  cfg.threshold_window = static_cast<uint32_t>(cfg_vec("cfg.threshold_window")[0]);
  cfg.seed = static_cast<uint64_t>(cfg_vec("cfg.seed")[0]);

  Network net = Network::create(cfg);
  for (auto& prm : net.store().params()) {
    auto it = tensors.find(prm.name);
    if (it == tensors.end())
      throw FormatError("checkpoint: missing tensor '" + prm.name + "' in '" + path + "'");
    if (it->second.dims != prm.value.dims)
      throw FormatError("checkpoint: shape mismatch for '" + prm.name + "' in '" + path + "'");
    prm.value.v = it->second.v;
  }
  return net;
}

}  // namespace ldc
