#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annotation.hpp"
#include "postprocess.hpp"

namespace ldc {

// Match radius of the localization protocol: half the box diagonal.
double sigma_l(double w, double h);
double sigma_l(const Box& b);

struct MatchPair {
  int pred = -1;
  int gt = -1;
  double dist = 0.0;
};

// One-to-one matching result; indices never repeat within a side.
struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gt;

  size_t tp() const { return pairs.size(); }
  double total_dist() const;
};

// Maximum-cardinality one-to-one matching over admissible pairs, breaking
// cardinality ties by minimum total distance (Hungarian over the admissible
// bipartite graph). A pair (p, g) is admissible when dist(p, g) <= radii[g].
MatchResult match_points(std::span<const Point> pred, std::span<const Point> gt,
                         std::span<const double> radii);
// Uniform admissibility radius.
MatchResult match_points(std::span<const Point> pred, std::span<const Point> gt, double radius);
// Unconstrained: min(|pred|, |gt|) pairs at minimum total distance.
MatchResult match_points_unconstrained(std::span<const Point> pred, std::span<const Point> gt);

struct Prf {
  double pre = 0.0, rec = 0.0, f1 = 0.0;
  bool degenerate = false;  // an empty denominator was zero-filled
};

Prf prf(size_t tp, size_t fp, size_t fn);

// Per-image inputs for dataset-level metrics.
struct EvalImage {
  std::string id;
  std::vector<Point> pred_points;
  std::vector<Detection> pred_boxes;
  std::vector<Point> gt_points;
  std::vector<Box> gt_boxes;  // real or pseudo; aligned with gt_points
  bool gt_boxes_real = false; // true when boxes come from the annotation
};

struct SigmaLResult {
  size_t tp = 0, fp = 0, fn = 0;
  Prf scores;
  // Recall per head-area decade bin A0..A5; absent when a bin has no gt.
  std::map<int, double> area_recall;
  // Mean relative half-diagonal error of matched predicted boxes.
  std::optional<double> mean_rel_size_err;
};

SigmaLResult eval_sigma_l(std::span<const EvalImage> images);

struct ApArResult {
  double ap = 0.0, ar = 0.0, f1 = 0.0;
  bool flagged = false;  // some thresholds had empty denominators
};

// Precision/recall averaged over integer distance thresholds 1..100.
ApArResult ap_ar_distance(std::span<const EvalImage> images);

// Mean localization error with a 16-pixel penalty per unmatched point on
// either side, normalized by the total ground-truth count. Absent when the
// dataset has no ground-truth points.
std::optional<double> mle(std::span<const EvalImage> images);

struct CountingMetrics {
  double mae = 0.0;
  double mse = 0.0;  // root mean square error, named as in the protocol
  double nae = 0.0;
  size_t nae_excluded = 0;  // zero-gt images excluded from NAE
};

CountingMetrics counting_metrics(std::span<const double> pred, std::span<const double> gt);

double box_iou(const Box& a, const Box& b);

struct DetectionEval {
  double ap = 0.0;
  Prf scores;  // from the full detection set, no score cut
  size_t tp = 0, fp = 0, fn = 0;
  std::vector<std::pair<double, double>> pr_curve;  // (recall, precision)
  std::map<int, double> area_recall;
  bool flagged = false;
};

// Score-descending greedy assignment per image (each gt used at most once,
// admissible when IOU >= threshold), PR over the dataset-wide score sweep,
// AP by all-point interpolation.
DetectionEval detection_eval(std::span<const EvalImage> images, double iou_threshold);

// Head-area decade bin (A0..A5) for a gt box area.
int area_bin(double area);

struct MetricsReport {
  SigmaLResult sigma;
  ApArResult ap_ar;
  std::optional<double> mle_value;
  CountingMetrics counting;
  std::map<std::string, DetectionEval> detection;  // key: "iou_0.50" etc.
  bool detection_available = false;
  std::vector<std::string> protocol;  // decision strings for reproducibility
};

MetricsReport evaluate_dataset(std::span<const EvalImage> images,
                               std::span<const double> iou_thresholds);

void write_report_json(const std::string& path, const MetricsReport& r);
void write_report_csv(const std::string& path, const MetricsReport& r);

}  // namespace ldc
