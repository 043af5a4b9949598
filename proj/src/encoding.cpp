#include "medsmooth/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace medsmooth {
namespace {

// Full order over every field so the result never depends on input order.
bool tie_break_less(const Detection& a, const Detection& b) {
  return std::tuple(a.label, -a.objectness, a.box.x1, a.box.y1, a.box.x2, a.box.y2) <
         std::tuple(b.label, -b.objectness, b.box.x1, b.box.y1, b.box.x2, b.box.y2);
}

int grid_index(double center, double extent) {
  const double scaled = std::floor(3.0 * center / extent);
  return static_cast<int>(std::clamp(scaled, 0.0, 2.0));
}

}  // namespace

std::string_view to_string(SortMode mode) noexcept {
  return mode == SortMode::objectness ? "objectness" : "location";
}

std::string_view to_string(BinMode mode) noexcept {
  switch (mode) {
    case BinMode::none: return "none";
    case BinMode::label: return "label";
    case BinMode::location: return "location";
    case BinMode::location_label: return "location+label";
  }
  return "none";
}

SortMode parse_sort_mode(std::string_view text) {
  if (text == "objectness") return SortMode::objectness;
  if (text == "location") return SortMode::location;
  throw std::invalid_argument("unknown sort mode: " + std::string(text));
}

BinMode parse_bin_mode(std::string_view text) {
  if (text == "none") return BinMode::none;
  if (text == "label") return BinMode::label;
  if (text == "location") return BinMode::location;
  if (text == "location+label") return BinMode::location_label;
  throw std::invalid_argument("unknown bin mode: " + std::string(text));
}

std::vector<Detection> sort_detections(std::vector<Detection> dets, SortMode mode) {
  std::sort(dets.begin(), dets.end(), tie_break_less);
  if (mode == SortMode::objectness) {
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      return std::tuple(-a.objectness, a.box.center_x(), a.box.center_y()) <
             std::tuple(-b.objectness, b.box.center_x(), b.box.center_y());
    });
    return dets;
  }
  // Vertical pass first, then horizontal: the horizontal center ends up as
  // the primary key.
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    return a.box.center_y() < b.box.center_y();
  });
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    return a.box.center_x() < b.box.center_x();
  });
  return dets;
}

int grid_cell(const Box& box, ImageSize image) {
  return grid_index(box.center_y(), image.height) * 3 + grid_index(box.center_x(), image.width);
}

std::map<BinKey, std::vector<Detection>> bin_detections(std::span<const Detection> dets,
                                                        BinMode mode, ImageSize image) {
  if (!(image.width > 0.0) || !(image.height > 0.0)) {
    throw std::invalid_argument("image size must be positive for binning");
  }
  const bool by_label = mode == BinMode::label || mode == BinMode::location_label;
  const bool by_cell = mode == BinMode::location || mode == BinMode::location_label;
  std::map<BinKey, std::vector<Detection>> bins;
  for (const auto& d : dets) {
    BinKey key{by_label ? d.label : kWildcard, by_cell ? grid_cell(d.box, image) : kWildcard};
    bins[key].push_back(d);
  }
  return bins;
}

BinTable::BinTable(std::size_t samples, std::size_t slots)
    : samples_(samples),
      slots_(slots),
      values_(samples * slots * kCoordsPerSlot, kSentinel),
      objectness_(samples * slots, 0.0) {}

std::span<const double> BinTable::column(std::size_t col) const {
  return std::span<const double>(values_).subspan(col * samples_, samples_);
}

std::span<const double> BinTable::objectness(std::size_t slot) const {
  return std::span<const double>(objectness_).subspan(slot * samples_, samples_);
}

void BinTable::set_slot(std::size_t sample, std::size_t slot, const Detection& det) {
  const std::size_t base = slot * kCoordsPerSlot;
  const Tuple5 coords{det.box.x1, det.box.y1, det.box.x2, det.box.y2,
                      static_cast<double>(det.label)};
  for (std::size_t c = 0; c < kCoordsPerSlot; ++c) {
    values_[(base + c) * samples_ + sample] = coords[c];
  }
  objectness_[slot * samples_ + sample] = det.objectness;
}

std::size_t RegressionMatrix::total_slots() const noexcept {
  std::size_t total = 0;
  for (const auto& [key, table] : bins) total += table.slots();
  return total;
}

RegressionMatrix encode_to_vectors(std::span<const std::vector<Detection>> per_sample,
                                   const EncodingOptions& options) {
  if (per_sample.empty()) throw std::invalid_argument("need at least one noise sample");

  std::vector<std::map<BinKey, std::vector<Detection>>> binned;
  binned.reserve(per_sample.size());
  std::map<BinKey, std::size_t> widths;
  for (const auto& dets : per_sample) {
    std::vector<Detection> kept;
    for (const auto& d : dets) {
      if (d.objectness >= options.objectness_threshold) kept.push_back(d);
    }
    auto bins = bin_detections(kept, options.bin, options.image);
    for (auto& [key, list] : bins) {
      list = sort_detections(std::move(list), options.sort);
      auto& w = widths[key];
      w = std::max(w, list.size());
    }
    binned.push_back(std::move(bins));
  }

  RegressionMatrix matrix;
  matrix.samples = per_sample.size();
  for (const auto& [key, width] : widths) {
    BinTable table(per_sample.size(), width);
    for (std::size_t s = 0; s < binned.size(); ++s) {
      const auto it = binned[s].find(key);
      if (it == binned[s].end()) continue;
      for (std::size_t slot = 0; slot < it->second.size(); ++slot) {
        table.set_slot(s, slot, it->second[slot]);
      }
    }
    matrix.bins.emplace(key, std::move(table));
  }
  return matrix;
}

bool DecodedSlot::lower_is_sentinel() const noexcept {
  return std::all_of(lower.begin(), lower.end(), [](double v) { return v == kSentinel; });
}

bool DecodedSlot::upper_is_sentinel() const noexcept {
  return std::all_of(upper.begin(), upper.end(), [](double v) { return v == kSentinel; });
}

std::vector<DecodedSlot> decode_from_vectors(std::span<const BinBounds> bins) {
  std::vector<DecodedSlot> out;
  for (const auto& bin : bins) {
    if (bin.columns.size() != bin.slots * kCoordsPerSlot) {
      throw std::invalid_argument("bin bounds do not match the slot layout");
    }
    for (std::size_t slot = 0; slot < bin.slots; ++slot) {
      DecodedSlot d;
      d.bin = bin.key;
      d.slot = slot;
      Tuple5 median{};
      for (std::size_t c = 0; c < kCoordsPerSlot; ++c) {
        const auto& col = bin.columns[slot * kCoordsPerSlot + c];
        median[c] = col.median;
        d.lower[c] = col.lower;
        d.upper[c] = col.upper;
      }
      d.present = std::all_of(median.begin(), median.end(),
                              [](double v) { return std::isfinite(v); });
      if (d.present) {
        Box box{median[0], median[1], median[2], median[3]};
        if (box.x1 > box.x2) {
          std::swap(box.x1, box.x2);
          d.reordered = true;
        }
        if (box.y1 > box.y2) {
          std::swap(box.y1, box.y2);
          d.reordered = true;
        }
        d.median = Detection{box, static_cast<int>(median[4]),
                             slot < bin.objectness.size() ? bin.objectness[slot] : 0.0};
      }
      out.push_back(d);
    }
  }
  return out;
}

std::vector<Detection> present_detections(std::span<const DecodedSlot> slots) {
  std::vector<Detection> out;
  for (const auto& s : slots) {
    if (s.present) out.push_back(s.median);
  }
  return out;
}

}  // namespace medsmooth
