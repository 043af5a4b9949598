#pragma once

#include <cstddef>
#include <limits>

namespace medsmooth {

inline constexpr double kSentinel = std::numeric_limits<double>::infinity();

// Axis-aligned box in pixel coordinates. Bound boxes may carry +-inf.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x1 + x2); }
  double center_y() const noexcept { return 0.5 * (y1 + y2); }
  bool ordered() const noexcept { return x1 <= x2 && y1 <= y2; }
  bool finite() const noexcept;

  bool operator==(const Box&) const = default;
};

struct Detection {
  Box box;
  int label = 0;
  double objectness = 0.0;

  bool operator==(const Detection&) const = default;
};

struct GroundTruth {
  Box box;
  int label = 0;
};

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

}  // namespace medsmooth
