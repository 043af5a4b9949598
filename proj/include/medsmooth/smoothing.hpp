// Percentile smoothing of scalar outputs under Gaussian input noise, with the
// mean-smoothing bound kept alongside for comparison.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "medsmooth/stats.hpp"

namespace medsmooth {

/// Sorted multiset of Monte Carlo outputs. +inf marks an absent output and
/// sorts above every finite value.
class SampleSet {
 public:
  explicit SampleSet(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  /// K_rank for a 1-based rank; rank 0 is -inf and rank n + 1 is +inf.
  double order_statistic(std::size_t rank) const;
  bool contains(double v) const;

 private:
  std::vector<double> values_;
};

/// 1-based rank of the median order statistic: sorted index floor(n/2).
constexpr std::size_t median_rank(std::size_t n) noexcept { return n / 2 + 1; }

struct SmoothedBound {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
  OrderIndices indices;

  /// Every admissible perturbation leaves the median at the sentinel.
  bool certifiably_absent() const noexcept;
  /// Some admissible perturbation may move the median to the sentinel.
  bool possibly_absent() const noexcept;
};

double median_of_samples(const SampleSet& samples);

/// Order statistics at the given ranks. Ranks are widened to include the
/// median rank so that lower <= median <= upper holds for any alpha.
SmoothedBound bounds_at(const SampleSet& samples, const OrderIndices& indices);

/// Bounds for the p = 0.5 percentile under any perturbation of l2 norm below
/// epsilon, each holding with probability at least alpha.
SmoothedBound empirical_percentile_bounds(const SampleSet& samples, double epsilon, double sigma,
                                          double alpha,
                                          CoverageFormula formula = CoverageFormula::binomial_cdf);

/// Lipschitz bound for the mean-smoothed value of a function into [l, u].
std::pair<double, double> mean_smoothing_bounds(double g_value, double l, double u,
                                                double delta_norm, double sigma);

/// n draws of N(0, sigma^2) from the stream keyed by `seed`.
std::vector<double> gaussian_draws(double sigma, std::size_t n, std::uint64_t seed);

struct SmoothingComparison {
  double x = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

/// Monte Carlo mean and median of base_fn(x + G), G ~ N(0, sigma^2), at each
/// grid point. All grid points share one noise stream keyed by `seed`.
std::vector<SmoothingComparison> compare_smoothing(const std::function<double(double)>& base_fn,
                                                   std::span<const double> x_grid, double sigma,
                                                   std::size_t n, std::uint64_t seed);

}  // namespace medsmooth
