// Clean and certified precision/recall, greedy ground-truth matching and the
// step-area AP over a handful of objectness thresholds.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "medsmooth/detection.hpp"

namespace medsmooth {

inline constexpr std::array<double, 5> kDefaultThresholds{0.1, 0.2, 0.4, 0.6, 0.8};

struct Counts {
  std::size_t certifiably_correct = 0;
  std::size_t ground_truth = 0;
  std::size_t max_predicted = 0;
  std::size_t clean_correct = 0;
  std::size_t clean_predicted = 0;

  Counts& operator+=(const Counts& other) noexcept;
  bool operator==(const Counts&) const = default;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double cert_precision = 0.0;
  double cert_recall = 0.0;
  Counts counts;
};

struct APReport {
  std::vector<PRPoint> points;
  double ap_clean = 0.0;
  double ap_cert_lower = 0.0;
};

/// Greedy one-to-one matching. Predictions are visited by descending
/// objectness (ties by input index); each claims the unmatched ground truth
/// of the same label with the highest IoU >= tau (ties by lowest index).
/// Returns, per prediction, the matched ground-truth index or -1.
std::vector<int> match_to_ground_truth(std::span<const Detection> preds,
                                       std::span<const GroundTruth> gts, double tau);

/// num / den, with 0 / 0 = 1 and x / 0 = 0 otherwise.
double safe_ratio(std::size_t num, std::size_t den) noexcept;

PRPoint certified_pr(double threshold, const Counts& counts) noexcept;

struct RecallPrecision {
  double recall = 0.0;
  double precision = 0.0;
};

/// Sum of (r_i - r_{i-1}) * p_i over points sorted by recall, starting from
/// recall 0. Duplicate recalls keep the highest precision.
double step_area(std::vector<RecallPrecision> points);

/// Certified AP lower bound from the certified columns of each point.
double ap_lower_bound(std::span<const PRPoint> points);
/// Same step rule over the clean columns.
double clean_ap(std::span<const PRPoint> points);

/// Clean AP straight from smoothed detections. `per_threshold[t][i]` holds
/// the detections of image i at thresholds[t].
double clean_ap(std::span<const std::vector<std::vector<Detection>>> per_threshold,
                std::span<const std::vector<GroundTruth>> gts, double tau,
                std::span<const double> thresholds);

APReport make_ap_report(std::vector<PRPoint> points);

}  // namespace medsmooth
