// Reduction from variable-length detection lists to fixed-index regression
// columns, and back.
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsmooth/detection.hpp"

namespace medsmooth {

enum class SortMode { objectness, location };
enum class BinMode { none, label, location, location_label };

std::string_view to_string(SortMode mode) noexcept;
std::string_view to_string(BinMode mode) noexcept;
SortMode parse_sort_mode(std::string_view text);
BinMode parse_bin_mode(std::string_view text);

inline constexpr int kWildcard = -1;
inline constexpr std::size_t kCoordsPerSlot = 5;  // x1, y1, x2, y2, label

struct BinKey {
  int label = kWildcard;
  int cell = kWildcard;  // 3x3 grid cell, row-major, or wildcard

  auto operator<=>(const BinKey&) const = default;
};

std::vector<Detection> sort_detections(std::vector<Detection> dets, SortMode mode);

/// Grid cell of the box center: column floor(3 cx / W), row floor(3 cy / H),
/// each clamped to [0, 2]; returns row * 3 + column.
int grid_cell(const Box& box, ImageSize image);

std::map<BinKey, std::vector<Detection>> bin_detections(std::span<const Detection> dets,
                                                        BinMode mode, ImageSize image);

/// One bin: n noise samples by `slots` detections, five coordinates each.
/// Missing detections hold the +inf sentinel.
class BinTable {
 public:
  BinTable(std::size_t samples, std::size_t slots);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t slots() const noexcept { return slots_; }
  std::size_t columns() const noexcept { return slots_ * kCoordsPerSlot; }

  /// Column-major: all samples of one coordinate are contiguous.
  std::span<const double> column(std::size_t col) const;
  /// Objectness of each sample at a slot; absent entries are 0. Carried for
  /// ranking decoded detections, not certified.
  std::span<const double> objectness(std::size_t slot) const;

  double at(std::size_t sample, std::size_t col) const { return values_[col * samples_ + sample]; }
  void set_slot(std::size_t sample, std::size_t slot, const Detection& det);

 private:
  std::size_t samples_;
  std::size_t slots_;
  std::vector<double> values_;
  std::vector<double> objectness_;
};

struct RegressionMatrix {
  std::size_t samples = 0;
  std::map<BinKey, BinTable> bins;

  std::size_t total_slots() const noexcept;
};

struct EncodingOptions {
  SortMode sort = SortMode::location;
  BinMode bin = BinMode::location_label;
  double objectness_threshold = 0.0;
  ImageSize image{1.0, 1.0};
};

/// Per sample: drop detections below the objectness threshold, bin, sort
/// inside each bin, and lay out slots in order. Rows shorter than the widest
/// sample of their bin are padded with the sentinel.
RegressionMatrix encode_to_vectors(std::span<const std::vector<Detection>> per_sample,
                                   const EncodingOptions& options);

struct ColumnBounds {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
};

/// Per-column order statistics of one bin, plus the median objectness of
/// each slot.
struct BinBounds {
  BinKey key;
  std::size_t slots = 0;
  std::vector<ColumnBounds> columns;
  std::vector<double> objectness;
};

using Tuple5 = std::array<double, kCoordsPerSlot>;

struct DecodedSlot {
  BinKey bin;
  std::size_t slot = 0;
  bool present = false;  // finite median tuple
  Detection median;
  Tuple5 lower{};
  Tuple5 upper{};
  bool reordered = false;  // median corners were swapped into order

  bool lower_is_sentinel() const noexcept;
  bool upper_is_sentinel() const noexcept;
};

/// Every slot of every bin, in bin then slot order. Slots whose median is
/// the sentinel come back with present = false.
std::vector<DecodedSlot> decode_from_vectors(std::span<const BinBounds> bins);

/// Median detections of the present slots.
std::vector<Detection> present_detections(std::span<const DecodedSlot> slots);

}  // namespace medsmooth
