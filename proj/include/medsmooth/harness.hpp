// Desk-scale test bed: procedural scenes, Gaussian input noise and a
// synthetic detector whose output jitters with the noise it sees.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "medsmooth/certify.hpp"
#include "medsmooth/detection.hpp"
#include "medsmooth/image.hpp"

namespace medsmooth {

/// Adds i.i.d. N(0, sigma^2) noise to every pixel from the stream keyed by
/// (seed, image_id, sample_index). No clamping; sigma = 0 passes through.
Image perturb_input(const Image& image, double sigma, std::uint64_t seed, std::uint64_t image_id,
                    std::size_t sample_index);

struct SceneObject {
  Box box;
  int label = 0;
  double base_objectness = 1.0;
};

struct SyntheticScene {
  std::uint64_t id = 0;
  std::size_t width = 64;
  std::size_t height = 64;
  std::vector<SceneObject> objects;
  double background = 0.2;  // clean pixel value outside objects
};

struct SceneOptions {
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t min_objects = 2;
  std::size_t max_objects = 6;
  double min_side = 8.0;
  double max_side = 28.0;
  int labels = 4;
  double min_objectness = 0.15;
  double max_objectness = 0.95;
};

std::vector<SyntheticScene> generate_scenes(std::size_t count, std::uint64_t seed,
                                            const SceneOptions& options = {});

/// Clean image: background everywhere, objects filled with an intensity that
/// depends on their label.
Image render_scene(const SyntheticScene& scene);

struct SyntheticDetectorParams {
  double gain = 1.0;             // box shift per unit of mean noise, in image sizes
  double objectness_slope = 6.0;  // objectness lost per unit of |mean noise|
  double drop_floor = 0.05;       // objects scoring below this are not reported
};

/// For each object, mu = mean of (noisy - clean) over its box. Emits the box
/// shifted by (gain * mu * W, gain * mu * H) with objectness
/// clamp(base - slope * |mu|, 0, 1), unless that falls below the drop floor.
std::vector<Detection> synthetic_detect(const SyntheticScene& scene, const Image& noisy,
                                        const SyntheticDetectorParams& params = {});

Detector make_synthetic_detector(const SyntheticScene& scene,
                                 const SyntheticDetectorParams& params = {});

std::vector<GroundTruth> ground_truth_of(const SyntheticScene& scene);

}  // namespace medsmooth
