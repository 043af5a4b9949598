#include "medsmooth/pipeline.hpp"

#include <stdexcept>

namespace medsmooth {

std::vector<WorkItem> sample_scenes(const std::vector<SyntheticScene>& scenes,
                                    const SyntheticDetectorParams& params,
                                    const SmoothingConfig& config) {
  std::vector<WorkItem> items;
  items.reserve(scenes.size());
  for (const auto& scene : scenes) {
    const Image clean = render_scene(scene);
    WorkItem item;
    item.id = "scene-" + std::to_string(scene.id);
    item.size = clean.size();
    item.ground_truth = ground_truth_of(scene);
    item.samples = sample_detections(make_synthetic_detector(scene, params), clean, scene.id, config);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<WorkItem> items_from_offline(OfflineRun run, const SmoothingConfig& config,
                                         std::optional<ImageSize> fallback) {
  const bool needs_size = config.bin == BinMode::location || config.bin == BinMode::location_label;
  std::vector<WorkItem> items;
  for (auto& img : run.images) {
    WorkItem item;
    item.id = img.id;
    if (img.size) {
      item.size = *img.size;
    } else if (fallback) {
      item.size = *fallback;
    } else if (needs_size) {
      throw OfflineRunError("image '" + img.id + "' has no width/height, needed for location binning");
    } else {
      item.size = ImageSize{1.0, 1.0};
    }
    item.ground_truth = std::move(img.ground_truth);
    item.samples = std::move(img.samples);
    items.push_back(std::move(item));
  }
  return items;
}

CertificateReport certify_items(const std::vector<WorkItem>& items, const SmoothingConfig& config,
                                std::span<const double> thresholds, std::string source) {
  const auto ranks = certification_ranks(config);
  CertificateReport report;
  report.config = config;
  report.source = std::move(source);
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  std::vector<std::vector<ImageCertificate>> per_level(thresholds.size());
  for (const auto& item : items) {
    if (item.samples.size() != config.samples) {
      throw std::invalid_argument("item '" + item.id + "' has the wrong number of samples");
    }
    ImageRecord rec{item.id, item.size, item.ground_truth, {}};
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      SmoothingConfig level = config;
      level.objectness_threshold = thresholds[t];
      rec.levels.push_back(certify_samples(item.samples, item.ground_truth, item.size, level, ranks));
      per_level[t].push_back(rec.levels.back());
    }
    report.images.push_back(std::move(rec));
  }
  std::vector<PRPoint> points;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    points.push_back(certified_pr(thresholds[t], per_level[t]));
  }
  report.ap = make_ap_report(std::move(points));
  report.stats.images = items.size();
  report.stats.detector_calls = items.size() * config.samples;
  return report;
}

std::vector<std::vector<std::vector<Detection>>> detect_items(const std::vector<WorkItem>& items,
                                                              const SmoothingConfig& config,
                                                              std::span<const double> thresholds) {
  std::vector<std::vector<std::vector<Detection>>> out(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    SmoothingConfig level = config;
    level.objectness_threshold = thresholds[t];
    for (const auto& item : items) {
      out[t].push_back(smoothed_detections(item.samples, item.size, level));
    }
  }
  return out;
}

}  // namespace medsmooth
