#pragma once

#include <span>
#include <vector>

#include "grid.hpp"

namespace ldc {

struct LossConfig {
  double lambda = 0.01;    // OUSR weight
  double epsilon = 1e-10;  // stabilizer for the OUSR ratios
  bool size_foreground_only = false;
};

struct LossReport {
  double l_con = 0.0;
  double l_thr = 0.0;
  double l_ousr = 0.0;
  double l_size = 0.0;
  double total = 0.0;
};

// All losses reduce with a per-pixel mean inside the per-image norm and a
// 1/N (1/2N for the L2 term) batch mean, so values are resolution- and
// batch-size-independent. Gradients, when requested, are with respect to the
// first argument.

// L2 confidence regression: (1/2N) * sum_k mean((C_k - Chat_k)^2).
double l_con(std::span<const Grid> pred, std::span<const Grid> gt,
             std::vector<Grid>* grad = nullptr);

// L1 on the binary map against the confidence ground truth.
double l_thr(std::span<const Grid> bin, std::span<const Grid> gt,
             std::vector<Grid>* grad = nullptr);

// Over/under segmentation ratio for one image pair:
// sum(B.*(1-C))/(sum(1-C)+eps) + sum(|C-B|.*C)/(sum(C)+eps).
double l_ousr(const Grid& bin, const Grid& gt, double epsilon, Grid* grad = nullptr);
// Batch mean of the per-image ratios.
double l_ousr(std::span<const Grid> bin, std::span<const Grid> gt, double epsilon,
              std::vector<Grid>* grad = nullptr);

// L1 size regression, supervised over all pixels (background target 0). The
// foreground_only variant masks the loss to gt-foreground pixels.
double l_size(std::span<const Grid> pred, std::span<const Grid> gt, bool foreground_only = false,
              std::vector<Grid>* grad = nullptr);

// total = l_con + l_thr + lambda * l_ousr + l_size.
LossReport total_loss(double lc, double lt, double lo, double ls, const LossConfig& cfg);

}  // namespace ldc
