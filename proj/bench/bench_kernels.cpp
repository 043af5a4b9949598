// Serial vs OpenMP timings for the two pipeline kernels.
#include <chrono>
#include <cstdio>
#include <vector>

#include "medsmooth/harness.hpp"
#include "medsmooth/kernels.hpp"

using namespace medsmooth;

template <class F>
double time_ms(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

int main() {
  const auto scenes = generate_scenes(1, 5);
  const auto& scene = scenes.front();
  const Image clean = render_scene(scene);
  const auto detector = make_synthetic_detector(scene);
  const std::size_t n = 2000;
  const auto sample = [&](std::size_t i) { return detector(perturb_input(clean, 0.25, 1, 0, i)); };

  const int workers = kernels::default_workers();
  const double serial_eval = time_ms([&] { kernels::serial::evaluate_samples(n, sample); }, 3);
  const double omp_eval = time_ms([&] { kernels::evaluate_samples(n, sample, workers); }, 3);

  const auto samples = kernels::serial::evaluate_samples(n, sample);
  const auto matrix = encode_to_vectors(samples, EncodingOptions{SortMode::location, BinMode::none,
                                                                 0.1, clean.size()});
  const OrderIndices ranks{102, 1899, n, 0.99999};
  const double serial_cols = time_ms([&] { kernels::serial::column_bounds(matrix, ranks); }, 20);
  const double omp_cols = time_ms([&] { kernels::column_bounds(matrix, ranks, workers); }, 20);

  std::printf("workers %d, n = %zu, %zu regression columns\n", workers, n,
              matrix.total_slots() * kCoordsPerSlot);
  std::printf("%-18s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");
  std::printf("%-18s %10.2f %10.2f %8.2f\n", "evaluate_samples", serial_eval, omp_eval,
              serial_eval / omp_eval);
  std::printf("%-18s %10.3f %10.3f %8.2f\n", "column_bounds", serial_cols, omp_cols,
              serial_cols / omp_cols);
  return 0;
}
