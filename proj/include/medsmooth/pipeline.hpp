// Batch driver: turn scenes or offline runs into sampled work items, then
// certify them at a list of objectness thresholds.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medsmooth/certify.hpp"
#include "medsmooth/harness.hpp"
#include "medsmooth/offline.hpp"
#include "medsmooth/report.hpp"

namespace medsmooth {

struct WorkItem {
  std::string id;
  ImageSize size;
  std::vector<GroundTruth> ground_truth;
  SampleDetections samples;
};

/// Samples the synthetic detector `config.samples` times on every scene.
/// Scene ids key the noise streams.
std::vector<WorkItem> sample_scenes(const std::vector<SyntheticScene>& scenes,
                                    const SyntheticDetectorParams& params,
                                    const SmoothingConfig& config);

/// Offline images lacking a size fall back to `fallback`; binning by
/// location is rejected when neither is known.
std::vector<WorkItem> items_from_offline(OfflineRun run, const SmoothingConfig& config,
                                         std::optional<ImageSize> fallback = std::nullopt);

CertificateReport certify_items(const std::vector<WorkItem>& items, const SmoothingConfig& config,
                                std::span<const double> thresholds, std::string source);

/// Smoothed detections per threshold (outer) and item (inner).
std::vector<std::vector<std::vector<Detection>>> detect_items(const std::vector<WorkItem>& items,
                                                              const SmoothingConfig& config,
                                                              std::span<const double> thresholds);

}  // namespace medsmooth
