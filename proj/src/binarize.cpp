#include "binarize.hpp"

#include <cmath>

namespace ldc {

double clip_act(double x) {
  if (x <= 0.25) return 0.25;
  if (x >= 0.90) return 0.90;
  return x;
}

double clip_act_grad(double x) {
  if (x < 0.25) return std::exp(x - 0.25);
  if (x > 0.95) return 0.0;
  return 1.0;
}

Grid clip_act(const Grid& raw) {
  Grid out = raw;
  for (double& v : out.data) v = clip_act(v);
  return out;
}

Grid clip_act_grad(const Grid& raw) {
  Grid out = raw;
  for (double& v : out.data) v = clip_act_grad(v);
  return out;
}

Grid binarize(const Grid& conf, const Grid& thr) {
  if (!conf.same_shape(thr))
    throw InputError("binarize: confidence/threshold shape mismatch");
  Grid out(conf.height, conf.width);
  for (size_t k = 0; k < out.data.size(); ++k)
    out.data[k] = conf.data[k] >= thr.data[k] ? 1.0 : 0.0;
  return out;
}

BinarizeModule::Output BinarizeModule::forward(const Grid& conf, const Grid& thr_raw) {
  Output out;
  out.threshold = clip_act(thr_raw);
  out.binary = binarize(conf, out.threshold);
  thr_raw_ = thr_raw;
  has_cache_ = true;
  return out;
}

Grid BinarizeModule::backward(const Grid& d_binary, SurrogateRoute route) const {
  if (!has_cache_) throw StateError("BinarizeModule: backward called without forward cache");
  if (!d_binary.same_shape(thr_raw_))
    throw InputError("BinarizeModule: gradient shape mismatch");
  Grid out(d_binary.height, d_binary.width);
  if (route == SurrogateRoute::kToConfidence) {
    out.data = d_binary.data;
  } else {
    for (size_t k = 0; k < out.data.size(); ++k)
      out.data[k] = -d_binary.data[k] * clip_act_grad(thr_raw_.data[k]);
  }
  return out;
}

}  // namespace ldc
