#include "medsmooth/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "medsmooth/random.hpp"

namespace medsmooth {
namespace {

struct PixelRange {
  std::size_t x0, x1, y0, y1;  // half-open
};

// Pixels whose centers fall inside the box.
PixelRange pixels_of(const Box& box, std::size_t width, std::size_t height) {
  const auto lo = [](double v, std::size_t limit) {
    return static_cast<std::size_t>(std::clamp(std::ceil(v - 0.5), 0.0, static_cast<double>(limit)));
  };
  const auto hi = [](double v, std::size_t limit) {
    return static_cast<std::size_t>(
        std::clamp(std::floor(v - 0.5) + 1.0, 0.0, static_cast<double>(limit)));
  };
  PixelRange r{lo(box.x1, width), hi(box.x2, width), lo(box.y1, height), hi(box.y2, height)};
  r.x1 = std::max(r.x1, r.x0);
  r.y1 = std::max(r.y1, r.y0);
  return r;
}

double label_intensity(int label) { return 0.45 + 0.1 * static_cast<double>(label % 5); }

std::vector<Detection> detect_with_clean(const SyntheticScene& scene, const Image& clean,
                                         const Image& noisy,
                                         const SyntheticDetectorParams& params) {
  if (noisy.width != scene.width || noisy.height != scene.height) {
    throw std::invalid_argument("image size does not match the scene");
  }
  const double w = static_cast<double>(scene.width);
  const double h = static_cast<double>(scene.height);
  std::vector<Detection> out;
  for (const auto& obj : scene.objects) {
    const auto r = pixels_of(obj.box, scene.width, scene.height);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t y = r.y0; y < r.y1; ++y) {
      for (std::size_t x = r.x0; x < r.x1; ++x) {
        sum += noisy.at(x, y) - clean.at(x, y);
        ++count;
      }
    }
    const double mu = count > 0 ? sum / static_cast<double>(count) : 0.0;
    const double objectness =
        std::clamp(obj.base_objectness - params.objectness_slope * std::abs(mu), 0.0, 1.0);
    if (objectness < params.drop_floor) continue;
    const double dx = params.gain * mu * w;
    const double dy = params.gain * mu * h;
    out.push_back({Box{obj.box.x1 + dx, obj.box.y1 + dy, obj.box.x2 + dx, obj.box.y2 + dy},
                   obj.label, objectness});
  }
  return out;
}

}  // namespace

Image perturb_input(const Image& image, double sigma, std::uint64_t seed, std::uint64_t image_id,
                    std::size_t sample_index) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  Image out = image;
  if (sigma == 0.0) return out;
  auto engine = keyed_engine(seed, image_id, sample_index);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& px : out.pixels) px += noise(engine);
  return out;
}

std::vector<SyntheticScene> generate_scenes(std::size_t count, std::uint64_t seed,
                                            const SceneOptions& options) {
  if (options.min_objects > options.max_objects || options.min_side > options.max_side ||
      options.max_side > static_cast<double>(std::min(options.width, options.height))) {
    throw std::invalid_argument("inconsistent scene options");
  }
  std::vector<SyntheticScene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Stream 1 keeps scene layout independent of the noise streams.
    auto engine = keyed_engine(seed, 1, i);
    std::uniform_int_distribution<std::size_t> n_obj(options.min_objects, options.max_objects);
    std::uniform_real_distribution<double> side(options.min_side, options.max_side);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> label(0, options.labels - 1);
    std::uniform_real_distribution<double> objectness(options.min_objectness,
                                                      options.max_objectness);

    SyntheticScene scene;
    scene.id = i;
    scene.width = options.width;
    scene.height = options.height;
    const std::size_t k = n_obj(engine);
    for (std::size_t j = 0; j < k; ++j) {
      const double bw = side(engine);
      const double bh = side(engine);
      const double x1 = std::round(unit(engine) * (static_cast<double>(options.width) - bw));
      const double y1 = std::round(unit(engine) * (static_cast<double>(options.height) - bh));
      const double x2 = std::round(x1 + bw);
      const double y2 = std::round(y1 + bh);
      scene.objects.push_back({Box{x1, y1, x2, y2}, label(engine), objectness(engine)});
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

Image render_scene(const SyntheticScene& scene) {
  Image img(scene.width, scene.height, scene.background);
  for (const auto& obj : scene.objects) {
    const auto r = pixels_of(obj.box, scene.width, scene.height);
    for (std::size_t y = r.y0; y < r.y1; ++y) {
      for (std::size_t x = r.x0; x < r.x1; ++x) img.at(x, y) = label_intensity(obj.label);
    }
  }
  return img;
}

std::vector<Detection> synthetic_detect(const SyntheticScene& scene, const Image& noisy,
                                        const SyntheticDetectorParams& params) {
  return detect_with_clean(scene, render_scene(scene), noisy, params);
}

Detector make_synthetic_detector(const SyntheticScene& scene,
                                 const SyntheticDetectorParams& params) {
  return [scene, params, clean = render_scene(scene)](const Image& noisy) {
    return detect_with_clean(scene, clean, noisy, params);
  };
}

std::vector<GroundTruth> ground_truth_of(const SyntheticScene& scene) {
  std::vector<GroundTruth> gts;
  gts.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) gts.push_back({obj.box, obj.label});
  return gts;
}

}  // namespace medsmooth
