// Certificate files and their JSON/CSV renderings.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "medsmooth/certify.hpp"
#include "medsmooth/harness.hpp"
#include "medsmooth/metrics.hpp"

namespace medsmooth {

struct ImageRecord {
  std::string id;
  ImageSize size;
  std::vector<GroundTruth> ground_truth;
  std::vector<ImageCertificate> levels;  // one per objectness threshold
};

struct RunStats {
  std::size_t images = 0;
  std::size_t detector_calls = 0;
  std::vector<std::string> failed_images;
};

/// Everything needed to recompute the metrics: configuration, ground truth
/// and every certified box with its bounds.
struct CertificateReport {
  SmoothingConfig config;
  std::string source;  // "synthetic" or "offline:<detector>"
  std::vector<double> thresholds;
  std::vector<ImageRecord> images;
  APReport ap;
  RunStats stats;
};

/// Rescores every level at `tau` and rebuilds the PR table and AP values.
APReport evaluate_report(CertificateReport& report, double tau, MaxCountRule rule);

std::string render_report(const CertificateReport& report);
CertificateReport parse_report(std::string_view text);

std::string render_pr_csv(const std::vector<PRPoint>& points);

std::string render_scenes(const std::vector<SyntheticScene>& scenes);
std::vector<SyntheticScene> parse_scenes(std::string_view text);

std::string_view to_string(CoverageFormula f) noexcept;
std::string_view to_string(MaxCountRule r) noexcept;
CoverageFormula parse_coverage_formula(std::string_view text);
MaxCountRule parse_max_count_rule(std::string_view text);

}  // namespace medsmooth
