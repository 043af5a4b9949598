// Box and label certificates, and the smoothed Detect / CertifyDetect
// procedures over a black-box detector.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "medsmooth/detection.hpp"
#include "medsmooth/encoding.hpp"
#include "medsmooth/image.hpp"
#include "medsmooth/metrics.hpp"
#include "medsmooth/stats.hpp"

namespace medsmooth {

/// Which slots count towards the maximum number of predictions an adversary
/// could induce. `possibly_present` counts every slot whose lower bound is
/// not the sentinel; `certifiably_present` only slots with a finite upper
/// bound and is kept for comparison.
enum class MaxCountRule { possibly_present, certifiably_present };

struct SmoothingConfig {
  double sigma = 0.25;
  std::size_t samples = 2000;
  double epsilon = 0.36;
  double alpha = 0.99999;
  double tau = 0.5;
  double objectness_threshold = 0.1;
  SortMode sort = SortMode::location;
  BinMode bin = BinMode::location_label;
  std::uint64_t seed = 0;
  CoverageFormula coverage = CoverageFormula::binomial_cdf;
  MaxCountRule max_count = MaxCountRule::possibly_present;
  int workers = 1;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
  EncodingOptions encoding(ImageSize image) const;
};

struct CertifiedBox {
  Detection median;
  Box lower;
  Box upper;
  double label_lo = 0.0;
  double label_hi = 0.0;
  bool certified_label = false;
  BinKey bin;
  std::size_t slot = 0;
  bool reordered = false;

  // Filled by assess_certificate.
  int matched_gt = -1;
  std::optional<double> worst_iou_vs_gt;
  bool certifiably_correct = false;

  bool bounds_finite() const noexcept { return lower.finite() && upper.finite(); }
};

struct SlotCounts {
  std::size_t total = 0;
  std::size_t possibly_present = 0;
  std::size_t certifiably_present = 0;
};

struct ImageCertificate {
  std::vector<CertifiedBox> boxes;  // slots with a finite median
  SlotCounts slots;
  Counts counts;
};

CertifiedBox make_certified_box(const DecodedSlot& slot);

double worst_case_iou(const CertifiedBox& cert, const Box& gt) noexcept;

/// Worst-case IoU reaches tau and the label bounds collapse onto gt_label.
bool is_certifiably_correct(const CertifiedBox& cert, const Box& gt, int gt_label,
                            double tau) noexcept;

std::size_t max_predicted(const SlotCounts& slots, MaxCountRule rule) noexcept;

/// Matches median boxes to ground truth, fills worst-case IoU and
/// correctness on every box, and recomputes the image counts.
void assess_certificate(ImageCertificate& cert, std::span<const GroundTruth> gts, double tau,
                        MaxCountRule rule);

/// Aggregated certified and clean precision/recall over images.
PRPoint certified_pr(double threshold, std::span<const ImageCertificate> images);

class DetectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Detector = std::function<std::vector<Detection>(const Image&)>;
using Denoiser = std::function<Image(const Image&)>;
using SampleDetections = std::vector<std::vector<Detection>>;

/// Runs the detector on `config.samples` noisy copies of `image`, each
/// passed through the optional denoiser first. Sample i of image `image_id`
/// always sees the same noise.
SampleDetections sample_detections(const Detector& detector, const Image& image,
                                   std::uint64_t image_id, const SmoothingConfig& config,
                                   const Denoiser& denoiser = {});

/// Per-column median of the encoded samples, decoded back to detections.
std::vector<Detection> smoothed_detections(std::span<const std::vector<Detection>> samples,
                                           ImageSize image, const SmoothingConfig& config);

std::vector<Detection> smoothed_detect(const Detector& detector, const Image& image,
                                       std::uint64_t image_id, const SmoothingConfig& config,
                                       const Denoiser& denoiser = {});

/// Order-statistic ranks for the configured radius and confidence.
OrderIndices certification_ranks(const SmoothingConfig& config);

ImageCertificate certify_samples(std::span<const std::vector<Detection>> samples,
                                 std::span<const GroundTruth> gts, ImageSize image,
                                 const SmoothingConfig& config, const OrderIndices& ranks);
ImageCertificate certify_samples(std::span<const std::vector<Detection>> samples,
                                 std::span<const GroundTruth> gts, ImageSize image,
                                 const SmoothingConfig& config);

ImageCertificate certify_detect(const Detector& detector, const Image& image,
                                std::uint64_t image_id, std::span<const GroundTruth> gts,
                                const SmoothingConfig& config, const Denoiser& denoiser = {});

}  // namespace medsmooth
