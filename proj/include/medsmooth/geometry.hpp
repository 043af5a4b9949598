#pragma once

#include "medsmooth/detection.hpp"

namespace medsmooth {

/// Intersection over union. Zero-area boxes score 0 against anything.
double iou(const Box& a, const Box& b) noexcept;

/// Minimum IoU against `gt` over every box whose coordinates lie within
/// [lower, upper] component-wise.
///
/// Returns 0 for any non-finite bound, and when lower.x2 <= upper.x1 or
/// lower.y2 <= upper.y1 (an admissible box may then be empty). Otherwise the
/// minimum is attained at one of the 16 corner boxes, which are enumerated;
/// corners with x1 > x2 or y1 > y2 are skipped.
double worst_case_iou(const Box& lower, const Box& upper, const Box& gt) noexcept;

}  // namespace medsmooth
