#include "medsmooth/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "medsmooth/geometry.hpp"

namespace medsmooth {

Counts& Counts::operator+=(const Counts& other) noexcept {
  certifiably_correct += other.certifiably_correct;
  ground_truth += other.ground_truth;
  max_predicted += other.max_predicted;
  clean_correct += other.clean_correct;
  clean_predicted += other.clean_predicted;
  return *this;
}

std::vector<int> match_to_ground_truth(std::span<const Detection> preds,
                                       std::span<const GroundTruth> gts, double tau) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].objectness > preds[b].objectness;
  });

  std::vector<int> match(preds.size(), -1);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t p : order) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].label != preds[p].label) continue;
      const double v = iou(preds[p].box, gts[g].box);
      if (v >= tau && v > best_iou) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      match[p] = best;
      taken[static_cast<std::size_t>(best)] = true;
    }
  }
  return match;
}

double safe_ratio(std::size_t num, std::size_t den) noexcept {
  if (den == 0) return num == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

PRPoint certified_pr(double threshold, const Counts& c) noexcept {
  PRPoint p;
  p.threshold = threshold;
  p.counts = c;
  p.precision = safe_ratio(c.clean_correct, c.clean_predicted);
  p.recall = safe_ratio(c.clean_correct, c.ground_truth);
  p.cert_precision = safe_ratio(c.certifiably_correct, c.max_predicted);
  p.cert_recall = safe_ratio(c.certifiably_correct, c.ground_truth);
  return p;
}

double step_area(std::vector<RecallPrecision> points) {
  if (points.empty()) throw std::invalid_argument("step area needs at least one point");
  std::sort(points.begin(), points.end(), [](const RecallPrecision& a, const RecallPrecision& b) {
    return a.recall < b.recall || (a.recall == b.recall && a.precision > b.precision);
  });
  double area = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].recall == points[i - 1].recall) continue;
    area += (points[i].recall - prev_recall) * points[i].precision;
    prev_recall = points[i].recall;
  }
  return area;
}

double ap_lower_bound(std::span<const PRPoint> points) {
  std::vector<RecallPrecision> rp;
  for (const auto& p : points) rp.push_back({p.cert_recall, p.cert_precision});
  return step_area(std::move(rp));
}

double clean_ap(std::span<const PRPoint> points) {
  std::vector<RecallPrecision> rp;
  for (const auto& p : points) rp.push_back({p.recall, p.precision});
  return step_area(std::move(rp));
}

double clean_ap(std::span<const std::vector<std::vector<Detection>>> per_threshold,
                std::span<const std::vector<GroundTruth>> gts, double tau,
                std::span<const double> thresholds) {
  if (per_threshold.size() != thresholds.size()) {
    throw std::invalid_argument("one detection set per threshold expected");
  }
  std::vector<PRPoint> points;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    if (per_threshold[t].size() != gts.size()) {
      throw std::invalid_argument("detections and ground truth disagree on image count");
    }
    Counts c;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto match = match_to_ground_truth(per_threshold[t][i], gts[i], tau);
      c.ground_truth += gts[i].size();
      c.clean_predicted += per_threshold[t][i].size();
      c.clean_correct += static_cast<std::size_t>(
          std::count_if(match.begin(), match.end(), [](int m) { return m >= 0; }));
    }
    points.push_back(certified_pr(thresholds[t], c));
  }
  return clean_ap(points);
}

APReport make_ap_report(std::vector<PRPoint> points) {
  APReport r;
  r.ap_clean = clean_ap(points);
  r.ap_cert_lower = ap_lower_bound(points);
  r.points = std::move(points);
  return r;
}

}  // namespace medsmooth
