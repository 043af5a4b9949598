#pragma once

#include <cstddef>
#include <vector>

#include "medsmooth/detection.hpp"

namespace medsmooth {

/// Single-channel image, row-major, intensities nominally in [0, 1].
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

  double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  ImageSize size() const noexcept {
    return {static_cast<double>(width), static_cast<double>(height)};
  }
};

}  // namespace medsmooth
