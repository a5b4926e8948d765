#include "loss.hpp"

#include <cmath>

namespace ldc {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_batch(std::span<const Grid> a, std::span<const Grid> b, const char* op) {
  if (a.empty() || a.size() != b.size())
    throw InputError(std::string(op) + ": batch size mismatch or empty batch");
  for (size_t k = 0; k < a.size(); ++k) {
    if (!a[k].same_shape(b[k])) throw InputError(std::string(op) + ": shape mismatch in batch");
  }
}

}  // namespace

double l_con(std::span<const Grid> pred, std::span<const Grid> gt, std::vector<Grid>* grad) {
  check_batch(pred, gt, "l_con");
  const double n = static_cast<double>(pred.size());
  if (grad) grad->assign(pred.size(), Grid());
  std::vector<double> per_image(pred.size());
  for (size_t k = 0; k < pred.size(); ++k) {
    const Grid& p = pred[k];
    const Grid& g = gt[k];
    const double inv_px = 1.0 / static_cast<double>(p.size());
    std::vector<double> sq(p.size());
    for (size_t t = 0; t < p.size(); ++t) {
      const double d = g.data[t] - p.data[t];
      sq[t] = d * d;
    }
    per_image[k] = pairwise_sum(sq) * inv_px;
    if (grad) {
      Grid gk(p.height, p.width);
      const double scale = inv_px / n;  // d/dpred of (1/2N) * mean((g-p)^2)
      for (size_t t = 0; t < p.size(); ++t) gk.data[t] = (p.data[t] - g.data[t]) * scale;
      (*grad)[k] = std::move(gk);
    }
  }
  return pairwise_sum(per_image) / (2.0 * n);
}

double l_thr(std::span<const Grid> bin, std::span<const Grid> gt, std::vector<Grid>* grad) {
  check_batch(bin, gt, "l_thr");
  const double n = static_cast<double>(bin.size());
  if (grad) grad->assign(bin.size(), Grid());
  std::vector<double> per_image(bin.size());
  for (size_t k = 0; k < bin.size(); ++k) {
    const Grid& b = bin[k];
    const Grid& g = gt[k];
    const double inv_px = 1.0 / static_cast<double>(b.size());
    std::vector<double> ab(b.size());
    for (size_t t = 0; t < b.size(); ++t) ab[t] = std::abs(g.data[t] - b.data[t]);
    per_image[k] = pairwise_sum(ab) * inv_px;
    if (grad) {
      Grid gk(b.height, b.width);
      const double scale = inv_px / n;
      for (size_t t = 0; t < b.size(); ++t) gk.data[t] = sgn(b.data[t] - g.data[t]) * scale;
      (*grad)[k] = std::move(gk);
    }
  }
  return pairwise_sum(per_image) / n;
}

double l_ousr(const Grid& bin, const Grid& gt, double epsilon, Grid* grad) {
  if (!bin.same_shape(gt)) throw InputError("l_ousr: shape mismatch");
  if (epsilon <= 0.0) throw InputError("l_ousr: epsilon must be > 0");
  std::vector<double> over(bin.size()), under(bin.size());
  double fg = 0.0;
  for (size_t t = 0; t < bin.size(); ++t) {
    const double c = gt.data[t];
    over[t] = bin.data[t] * (1.0 - c);
    under[t] = std::abs(c - bin.data[t]) * c;
    fg += c;
  }
  const double bg = static_cast<double>(bin.size()) - fg;
  const double over_den = bg + epsilon;
  const double under_den = fg + epsilon;
  const double value = pairwise_sum(over) / over_den + pairwise_sum(under) / under_den;
  if (grad) {
    *grad = Grid(bin.height, bin.width);
    for (size_t t = 0; t < bin.size(); ++t) {
      const double c = gt.data[t];
      grad->data[t] = (1.0 - c) / over_den + sgn(bin.data[t] - c) * c / under_den;
    }
  }
  return value;
}

double l_ousr(std::span<const Grid> bin, std::span<const Grid> gt, double epsilon,
              std::vector<Grid>* grad) {
  check_batch(bin, gt, "l_ousr");
  const double n = static_cast<double>(bin.size());
  if (grad) grad->assign(bin.size(), Grid());
  std::vector<double> per_image(bin.size());
  for (size_t k = 0; k < bin.size(); ++k) {
    Grid gk;
    per_image[k] = l_ousr(bin[k], gt[k], epsilon, grad ? &gk : nullptr);
    if (grad) {
      for (double& v : gk.data) v /= n;
      (*grad)[k] = std::move(gk);
    }
  }
  return pairwise_sum(per_image) / n;
}

double l_size(std::span<const Grid> pred, std::span<const Grid> gt, bool foreground_only,
              std::vector<Grid>* grad) {
  check_batch(pred, gt, "l_size");
  const double n = static_cast<double>(pred.size());
  if (grad) grad->assign(pred.size(), Grid());
  std::vector<double> per_image(pred.size());
  for (size_t k = 0; k < pred.size(); ++k) {
    const Grid& p = pred[k];
    const Grid& g = gt[k];
    double denom;
    std::vector<double> ab;
    ab.reserve(p.size());
    if (foreground_only) {
      size_t fg = 0;
      for (size_t t = 0; t < p.size(); ++t) {
        if (g.data[t] > 0.0) {
          ab.push_back(std::abs(g.data[t] - p.data[t]));
          ++fg;
        }
      }
      denom = fg > 0 ? static_cast<double>(fg) : 1.0;
    } else {
      for (size_t t = 0; t < p.size(); ++t) ab.push_back(std::abs(g.data[t] - p.data[t]));
      denom = static_cast<double>(p.size());
    }
    per_image[k] = pairwise_sum(ab) / denom;
    if (grad) {
      Grid gk(p.height, p.width);
      const double scale = 1.0 / (denom * n);
      for (size_t t = 0; t < p.size(); ++t) {
        if (foreground_only && g.data[t] <= 0.0) continue;
        gk.data[t] = sgn(p.data[t] - g.data[t]) * scale;
      }
      (*grad)[k] = std::move(gk);
    }
  }
  return pairwise_sum(per_image) / n;
}

LossReport total_loss(double lc, double lt, double lo, double ls, const LossConfig& cfg) {
  if (cfg.lambda < 0.0) throw InputError("total_loss: lambda must be >= 0");
  if (lc < 0.0 || lt < 0.0 || lo < 0.0 || ls < 0.0)
    throw InputError("total_loss: loss components must be non-negative");
  LossReport r;
  r.l_con = lc;
  r.l_thr = lt;
  r.l_ousr = lo;
  r.l_size = ls;
  r.total = lc + lt + cfg.lambda * lo + ls;
  return r;
}

}  // namespace ldc
