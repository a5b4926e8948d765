#pragma once

#include "grid.hpp"

namespace ldc {

// Clipped threshold activation. Keeps thresholds inside [0.25, 0.90] while its
// stipulated derivative still passes gradient below the lower clamp, which is
// what prevents the runaway/NaN behaviour of sigmoid-style threshold squashing.
double clip_act(double x);

// The stipulated derivative: e^(x-0.25) below 0.25, zero above 0.95, one
// otherwise. The 0.90/0.95 asymmetry is intentional and kept as published.
double clip_act_grad(double x);

Grid clip_act(const Grid& raw);
Grid clip_act_grad(const Grid& raw);

// Hard binarization: 1 where confidence >= threshold (inclusive), else 0.
Grid binarize(const Grid& conf, const Grid& thr);

// Which side of the hard comparison a loss gradient is routed to. The unused
// side receives zero.
enum class SurrogateRoute { kToThreshold, kToConfidence };

// Binarization with cached state for the surrogate backward. The surrogate is
// unit-slope straight-through: d(bin)/d(conf) = +1, d(bin)/d(thr) = -1.
class BinarizeModule {
 public:
  struct Output {
    Grid threshold;  // activated threshold map, in [0.25, 0.90]
    Grid binary;     // {0, 1}-valued
  };

  // thr_raw is the threshold learner's pre-activation output.
  Output forward(const Grid& conf, const Grid& thr_raw);

  // Routes an upstream d(loss)/d(binary). kToThreshold additionally applies
  // the clip-activation derivative, returning d(loss)/d(thr_raw).
  Grid backward(const Grid& d_binary, SurrogateRoute route) const;

 private:
  bool has_cache_ = false;
  Grid thr_raw_;
};

}  // namespace ldc
