#include "medsmooth/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace medsmooth {

bool Box::finite() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2);
}

double iou(const Box& a, const Box& b) noexcept {
  const double area_a = a.area();
  const double area_b = b.area();
  if (!(area_a > 0.0) || !(area_b > 0.0)) return 0.0;
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (area_a + area_b - inter);
}

double worst_case_iou(const Box& lower, const Box& upper, const Box& gt) noexcept {
  if (!lower.finite() || !upper.finite()) return 0.0;
  if (lower.x2 <= upper.x1 || lower.y2 <= upper.y1) return 0.0;

  const std::array<double, 2> x1s{lower.x1, upper.x1};
  const std::array<double, 2> y1s{lower.y1, upper.y1};
  const std::array<double, 2> x2s{lower.x2, upper.x2};
  const std::array<double, 2> y2s{lower.y2, upper.y2};

  double worst = 1.0;
  for (double x1 : x1s) {
    for (double y1 : y1s) {
      for (double x2 : x2s) {
        for (double y2 : y2s) {
          if (x1 > x2 || y1 > y2) continue;
          worst = std::min(worst, iou(Box{x1, y1, x2, y2}, gt));
        }
      }
    }
  }
  return worst;
}

}  // namespace medsmooth
