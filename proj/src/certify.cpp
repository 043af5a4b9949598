#include "medsmooth/certify.hpp"

#include <cmath>
#include <string>

#include "medsmooth/geometry.hpp"
#include "medsmooth/harness.hpp"
#include "medsmooth/kernels.hpp"
#include "medsmooth/smoothing.hpp"

namespace medsmooth {

void SmoothingConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (!(objectness_threshold >= 0.0 && objectness_threshold <= 1.0)) {
    throw std::invalid_argument("objectness threshold must lie in [0, 1]");
  }
}

EncodingOptions SmoothingConfig::encoding(ImageSize image) const {
  return EncodingOptions{sort, bin, objectness_threshold, image};
}

CertifiedBox make_certified_box(const DecodedSlot& slot) {
  CertifiedBox c;
  c.median = slot.median;
  c.lower = Box{slot.lower[0], slot.lower[1], slot.lower[2], slot.lower[3]};
  c.upper = Box{slot.upper[0], slot.upper[1], slot.upper[2], slot.upper[3]};
  c.label_lo = slot.lower[4];
  c.label_hi = slot.upper[4];
  c.certified_label = std::isfinite(c.label_lo) && c.label_lo == c.label_hi;
  c.bin = slot.bin;
  c.slot = slot.slot;
  c.reordered = slot.reordered;
  return c;
}

double worst_case_iou(const CertifiedBox& cert, const Box& gt) noexcept {
  return worst_case_iou(cert.lower, cert.upper, gt);
}

bool is_certifiably_correct(const CertifiedBox& cert, const Box& gt, int gt_label,
                            double tau) noexcept {
  return cert.certified_label && cert.label_lo == static_cast<double>(gt_label) &&
         worst_case_iou(cert, gt) >= tau;
}

std::size_t max_predicted(const SlotCounts& slots, MaxCountRule rule) noexcept {
  return rule == MaxCountRule::possibly_present ? slots.possibly_present
                                                : slots.certifiably_present;
}

void assess_certificate(ImageCertificate& cert, std::span<const GroundTruth> gts, double tau,
                        MaxCountRule rule) {
  std::vector<Detection> medians;
  medians.reserve(cert.boxes.size());
  for (const auto& b : cert.boxes) medians.push_back(b.median);
  const auto match = match_to_ground_truth(medians, gts, tau);

  Counts c;
  c.ground_truth = gts.size();
  c.clean_predicted = cert.boxes.size();
  c.max_predicted = max_predicted(cert.slots, rule);
  for (std::size_t i = 0; i < cert.boxes.size(); ++i) {
    auto& box = cert.boxes[i];
    box.matched_gt = match[i];
    box.worst_iou_vs_gt.reset();
    box.certifiably_correct = false;
    if (match[i] < 0) continue;
    const auto& gt = gts[static_cast<std::size_t>(match[i])];
    ++c.clean_correct;
    box.worst_iou_vs_gt = worst_case_iou(box, gt.box);
    box.certifiably_correct = is_certifiably_correct(box, gt.box, gt.label, tau);
    if (box.certifiably_correct) ++c.certifiably_correct;
  }
  cert.counts = c;
}

PRPoint certified_pr(double threshold, std::span<const ImageCertificate> images) {
  Counts total;
  for (const auto& img : images) total += img.counts;
  return certified_pr(threshold, total);
}

SampleDetections sample_detections(const Detector& detector, const Image& image,
                                   std::uint64_t image_id, const SmoothingConfig& config,
                                   const Denoiser& denoiser) {
  config.validate();
  const auto run = [&](std::size_t i) {
    Image noisy = perturb_input(image, config.sigma, config.seed, image_id, i);
    if (denoiser) noisy = denoiser(noisy);
    try {
      return detector(noisy);
    } catch (const std::exception& e) {
      throw DetectorError("detector failed on image " + std::to_string(image_id) + " sample " +
                          std::to_string(i) + ": " + e.what());
    }
  };
  if (config.workers <= 1) return kernels::serial::evaluate_samples(config.samples, run);
  return kernels::evaluate_samples(config.samples, run, config.workers);
}

namespace {

std::vector<BinBounds> bounds_of(const RegressionMatrix& matrix, const OrderIndices& ranks,
                                 int workers) {
  if (workers <= 1) return kernels::serial::column_bounds(matrix, ranks);
  return kernels::column_bounds(matrix, ranks, workers);
}

}  // namespace

std::vector<Detection> smoothed_detections(std::span<const std::vector<Detection>> samples,
                                           ImageSize image, const SmoothingConfig& config) {
  const auto matrix = encode_to_vectors(samples, config.encoding(image));
  const std::size_t mid = median_rank(samples.size());
  const OrderIndices median_only{mid, mid, samples.size(), 0.5};
  const auto bins = bounds_of(matrix, median_only, config.workers);
  return present_detections(decode_from_vectors(bins));
}

std::vector<Detection> smoothed_detect(const Detector& detector, const Image& image,
                                       std::uint64_t image_id, const SmoothingConfig& config,
                                       const Denoiser& denoiser) {
  const auto samples = sample_detections(detector, image, image_id, config, denoiser);
  return smoothed_detections(samples, image.size(), config);
}

OrderIndices certification_ranks(const SmoothingConfig& config) {
  config.validate();
  const auto spec = adjusted_percentiles(0.5, config.epsilon, config.sigma);
  return find_order_indices(config.samples, spec, config.alpha, config.coverage);
}

ImageCertificate certify_samples(std::span<const std::vector<Detection>> samples,
                                 std::span<const GroundTruth> gts, ImageSize image,
                                 const SmoothingConfig& config, const OrderIndices& ranks) {
  if (samples.size() != ranks.n) {
    throw std::invalid_argument("sample count does not match the certification ranks");
  }
  const auto matrix = encode_to_vectors(samples, config.encoding(image));
  const auto slots = decode_from_vectors(bounds_of(matrix, ranks, config.workers));

  ImageCertificate cert;
  cert.slots.total = slots.size();
  for (const auto& s : slots) {
    if (!s.lower_is_sentinel()) ++cert.slots.possibly_present;
    if (std::all_of(s.upper.begin(), s.upper.end(), [](double v) { return std::isfinite(v); })) {
      ++cert.slots.certifiably_present;
    }
    if (s.present) cert.boxes.push_back(make_certified_box(s));
  }
  assess_certificate(cert, gts, config.tau, config.max_count);
  return cert;
}

ImageCertificate certify_samples(std::span<const std::vector<Detection>> samples,
                                 std::span<const GroundTruth> gts, ImageSize image,
                                 const SmoothingConfig& config) {
  return certify_samples(samples, gts, image, config, certification_ranks(config));
}

ImageCertificate certify_detect(const Detector& detector, const Image& image,
                                std::uint64_t image_id, std::span<const GroundTruth> gts,
                                const SmoothingConfig& config, const Denoiser& denoiser) {
  const auto ranks = certification_ranks(config);
  const auto samples = sample_detections(detector, image, image_id, config, denoiser);
  return certify_samples(samples, gts, image.size(), config, ranks);
}

}  // namespace medsmooth
