#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "medsmooth/certify.hpp"
#include "medsmooth/geometry.hpp"
#include "medsmooth/harness.hpp"

using namespace medsmooth;

TEST_CASE("zero sigma passes the image through") {
  Image img(5, 4, 0.3);
  img.at(2, 1) = 0.9;
  const auto out = perturb_input(img, 0.0, 1, 2, 3);
  CHECK(out.pixels == img.pixels);
  CHECK_THROWS_AS(perturb_input(img, -0.1, 1, 2, 3), std::invalid_argument);
}

TEST_CASE("noise streams are keyed by seed, image and sample") {
  const Image img(16, 16, 0.5);
  const auto a = perturb_input(img, 0.25, 7, 1, 10);
  CHECK(a.pixels == perturb_input(img, 0.25, 7, 1, 10).pixels);
  CHECK(a.pixels != perturb_input(img, 0.25, 7, 1, 11).pixels);
  CHECK(a.pixels != perturb_input(img, 0.25, 7, 2, 10).pixels);
  CHECK(a.pixels != perturb_input(img, 0.25, 8, 1, 10).pixels);
}

TEST_CASE("noise is centered and unclamped") {
  const double sigma = 0.25;
  const Image img(1000, 1000, 0.0);
  const auto noisy = perturb_input(img, sigma, 0, 0, 0);
  double sum = 0.0;
  double sq = 0.0;
  bool outside = false;
  for (double v : noisy.pixels) {
    sum += v;
    sq += v * v;
    outside = outside || v < 0.0 || v > 1.0;
  }
  const double n = static_cast<double>(noisy.pixels.size());
  CHECK(std::abs(sum / n) < 4.0 * sigma / 1000.0);
  CHECK(std::sqrt(sq / n) == Catch::Approx(sigma).epsilon(0.01));
  CHECK(outside);
}

TEST_CASE("scenes are reproducible and inside the image") {
  const auto a = generate_scenes(20, 5);
  const auto b = generate_scenes(20, 5);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == i);
    REQUIRE(a[i].objects.size() == b[i].objects.size());
    CHECK(a[i].objects.size() >= 2);
    CHECK(a[i].objects.size() <= 6);
    for (std::size_t j = 0; j < a[i].objects.size(); ++j) {
      const auto& o = a[i].objects[j];
      CHECK(o.box == b[i].objects[j].box);
      CHECK(o.box.x1 >= 0);
      CHECK(o.box.y1 >= 0);
      CHECK(o.box.x2 <= 64);
      CHECK(o.box.y2 <= 64);
      CHECK(o.box.ordered());
      CHECK(o.label >= 0);
      CHECK(o.label < 4);
    }
  }
  CHECK(generate_scenes(3, 6)[0].objects[0].box != a[0].objects[0].box);
}

TEST_CASE("synthetic detector without noise returns ground truth") {
  const auto scene = generate_scenes(1, 3).front();
  const auto img = render_scene(scene);
  const auto dets = synthetic_detect(scene, img);
  REQUIRE(dets.size() == scene.objects.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CHECK(dets[i].box == scene.objects[i].box);
    CHECK(dets[i].label == scene.objects[i].label);
    CHECK(dets[i].objectness == scene.objects[i].base_objectness);
  }
  CHECK_THROWS_AS(synthetic_detect(scene, Image(10, 10)), std::invalid_argument);
}

TEST_CASE("zero gain and slope make the detector noise invariant") {
  const auto scene = generate_scenes(1, 4).front();
  const auto img = render_scene(scene);
  const auto clean = synthetic_detect(scene, img, {0.0, 0.0, 0.05});
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(synthetic_detect(scene, perturb_input(img, 0.5, 0, 0, i), {0.0, 0.0, 0.05}) == clean);
  }
}

TEST_CASE("box jitter scales with gain sigma over root area") {
  SyntheticScene scene;
  scene.objects = {{Box{10, 10, 20, 20}, 0, 0.9}};  // 100 pixels
  const auto img = render_scene(scene);
  const double sigma = 0.25;
  const double expected_sd = 1.0 * sigma * 64.0 / std::sqrt(100.0);
  const std::size_t n = 2000;
  double sum = 0.0;
  double sq = 0.0;
  const SyntheticDetectorParams params{1.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = synthetic_detect(scene, perturb_input(img, sigma, 1, 0, i), params);
    REQUIRE(d.size() == 1);
    sum += d[0].box.x1 - 10.0;
    sq += (d[0].box.x1 - 10.0) * (d[0].box.x1 - 10.0);
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  // sd of a sample sd is about sd / sqrt(2n), 1.6%
  CHECK(sd == Catch::Approx(expected_sd).epsilon(0.06));
  CHECK(std::abs(mean) < 4.0 * expected_sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("drop floor makes the output count vary") {
  SyntheticScene scene;
  scene.objects = {{Box{5, 5, 9, 9}, 0, 0.35}, {Box{20, 20, 50, 50}, 1, 0.9}};
  const auto img = render_scene(scene);
  std::size_t min_count = 99;
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto d = synthetic_detect(scene, perturb_input(img, 0.25, 0, 0, i), {1.0, 6.0, 0.2});
    min_count = std::min(min_count, d.size());
    max_count = std::max(max_count, d.size());
  }
  CHECK(max_count <= scene.objects.size());
  CHECK(min_count < max_count);
}

TEST_CASE("certified boxes stay correct under actual bounded perturbations") {
  // Clean certificates, then the smoothed prediction at x + delta for
  // ||delta|| <= eps. Half the deltas push all their mass into a single
  // object box, the worst direction for this detector.
  SmoothingConfig config;
  config.samples = 500;
  config.alpha = 0.999;
  config.epsilon = 0.36;
  const auto scenes = generate_scenes(40, 99);
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> g;
  std::size_t pairs = 0;
  std::size_t held = 0;
  std::size_t checked_boxes = 0;
  for (const auto& scene : scenes) {
    const auto img = render_scene(scene);
    const auto gts = ground_truth_of(scene);
    const auto detector = make_synthetic_detector(scene);
    const auto cert = certify_detect(detector, img, scene.id, gts, config);
    for (int k = 0; k < 5; ++k) {
      Image delta(img.width, img.height, 0.0);
      if (k % 2 == 0) {
        for (auto& v : delta.pixels) v = g(rng);
      } else {
        const auto& box = scene.objects[rng() % scene.objects.size()].box;
        const double sign = (rng() % 2) ? 1.0 : -1.0;
        for (std::size_t y = 0; y < img.height; ++y)
          for (std::size_t x = 0; x < img.width; ++x)
            if (x + 0.5 > box.x1 && x + 0.5 < box.x2 && y + 0.5 > box.y1 && y + 0.5 < box.y2)
              delta.at(x, y) = sign;
      }
      double norm = 0.0;
      for (double v : delta.pixels) norm += v * v;
      norm = std::sqrt(norm);
      const double scale = config.epsilon * (0.999 * (0.5 + 0.5 * (k % 3 != 0))) / norm;
      Image moved = img;
      for (std::size_t i = 0; i < moved.pixels.size(); ++i) moved.pixels[i] += scale * delta.pixels[i];

      auto shifted = config;
      shifted.seed = 1000 + static_cast<std::uint64_t>(k);
      const auto preds = smoothed_detect(detector, moved, scene.id, shifted);
      bool ok = true;
      for (const auto& b : cert.boxes) {
        if (!b.certifiably_correct) continue;
        ++checked_boxes;
        const auto& gt = gts[static_cast<std::size_t>(b.matched_gt)];
        bool found = false;
        for (const auto& p : preds) {
          found = found || (p.label == gt.label && iou(p.box, gt.box) >= config.tau);
        }
        ok = ok && found;
      }
      ++pairs;
      if (ok) ++held;
    }
  }
  INFO(held << " of " << pairs << " pairs held over " << checked_boxes << " certified boxes");
  CHECK(pairs >= 200);
  CHECK(checked_boxes > 50);
  CHECK(static_cast<double>(held) >= 0.99 * static_cast<double>(pairs));
}
