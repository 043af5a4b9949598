#include "medsmooth/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "medsmooth/random.hpp"

namespace medsmooth {

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("sample set must not be empty");
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); })) {
    throw std::invalid_argument("sample set contains NaN");
  }
  std::sort(values_.begin(), values_.end());
}

double SampleSet::order_statistic(std::size_t rank) const {
  if (rank == 0) return -std::numeric_limits<double>::infinity();
  if (rank > values_.size()) return std::numeric_limits<double>::infinity();
  return values_[rank - 1];
}

bool SampleSet::contains(double v) const {
  return std::binary_search(values_.begin(), values_.end(), v);
}

bool SmoothedBound::certifiably_absent() const noexcept {
  return lower == std::numeric_limits<double>::infinity();
}

bool SmoothedBound::possibly_absent() const noexcept {
  return upper == std::numeric_limits<double>::infinity();
}

double median_of_samples(const SampleSet& samples) {
  return samples.values()[samples.size() / 2];
}

SmoothedBound bounds_at(const SampleSet& samples, const OrderIndices& indices) {
  const std::size_t mid = median_rank(samples.size());
  SmoothedBound b;
  b.indices = indices;
  b.median = samples.order_statistic(mid);
  b.lower = samples.order_statistic(std::min(indices.q_lo, mid));
  b.upper = samples.order_statistic(std::max(indices.q_hi, mid));
  return b;
}

SmoothedBound empirical_percentile_bounds(const SampleSet& samples, double epsilon, double sigma,
                                          double alpha, CoverageFormula formula) {
  const auto spec = adjusted_percentiles(0.5, epsilon, sigma);
  return bounds_at(samples, find_order_indices(samples.size(), spec, alpha, formula));
}

std::pair<double, double> mean_smoothing_bounds(double g_value, double l, double u,
                                                double delta_norm, double sigma) {
  if (!(l < u)) throw std::invalid_argument("mean smoothing bounds need l < u");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(delta_norm >= 0.0)) throw std::invalid_argument("perturbation norm must be >= 0");
  if (!(g_value >= l && g_value <= u)) {
    throw std::invalid_argument("smoothed value must lie in [l, u]");
  }
  if (delta_norm == 0.0) return {g_value, g_value};

  const double t = (g_value - l) / (u - l);
  if (t <= 0.0) return {l, l};
  if (t >= 1.0) return {u, u};
  const double eta = sigma * normal_quantile(t);
  return {l + (u - l) * normal_cdf((eta - delta_norm) / sigma),
          l + (u - l) * normal_cdf((eta + delta_norm) / sigma)};
}

std::vector<double> gaussian_draws(double sigma, std::size_t n, std::uint64_t seed) {
  auto engine = keyed_engine(seed, 0, 0);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> draws(n);
  for (auto& g : draws) g = normal(engine);
  return draws;
}

std::vector<SmoothingComparison> compare_smoothing(const std::function<double(double)>& base_fn,
                                                   std::span<const double> x_grid, double sigma,
                                                   std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  const auto noise = gaussian_draws(sigma, n, seed);

  std::vector<SmoothingComparison> out;
  out.reserve(x_grid.size());
  std::vector<double> values(n);
  for (double x : x_grid) {
    for (std::size_t i = 0; i < n; ++i) values[i] = base_fn(x + noise[i]);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    out.push_back({x, mean, median_of_samples(SampleSet(values))});
  }
  return out;
}

}  // namespace medsmooth
