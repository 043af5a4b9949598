// Interchange format for detections computed outside this process.
//
// A run directory holds `manifest.json`:
//
//   {"detector": "...", "sigma": 0.25, "n": 2000, "seed": 0,
//    "images": ["img0", {"id": "img1", "width": 640, "height": 480,
//                        "ground_truth": [{"x1":..,"y1":..,"x2":..,"y2":..,"label":..}]}],
//    "failed": [{"id": "img2", "reason": "..."}]}
//
// and any number of `*.jsonl` files below it. Each line is one noise sample
// of one image:
//
//   {"image_id": "img0", "sample_index": 3,
//    "detections": [{"x1":..,"y1":..,"x2":..,"y2":..,"label":2,"objectness":0.9}]}
//
// Coordinates are pixels; unknown fields are ignored.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medsmooth/detection.hpp"

namespace medsmooth {

class OfflineRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OfflineManifest {
  std::string detector;
  double sigma = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct OfflineImage {
  std::string id;
  std::optional<ImageSize> size;
  std::vector<GroundTruth> ground_truth;
  std::vector<std::vector<Detection>> samples;  // exactly n entries once loaded
};

struct FailedImage {
  std::string id;
  std::string reason;
};

struct OfflineRun {
  OfflineManifest manifest;
  std::vector<OfflineImage> images;
  std::vector<FailedImage> failed;
};

/// `path` is the run directory or its manifest file.
OfflineRun load_offline_run(const std::filesystem::path& path);

/// Writes one `.jsonl` file per image under `dir/detections/`, then the
/// manifest.
void write_offline_run(const OfflineRun& run, const std::filesystem::path& dir);

/// Rejects a run whose manifest disagrees with explicitly requested sigma or
/// sample count.
void check_run_parameters(const OfflineRun& run, std::optional<double> sigma,
                          std::optional<std::size_t> n);

}  // namespace medsmooth
