#include "medsmooth/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace medsmooth {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Acklam's rational approximation for the lower half (p <= 0.5), relative
// error about 1e-9 before refinement.
double acklam_lower(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double quantile_lower(double p) {
  double x = acklam_lower(p);
  // Halley steps against the erfc-based CDF.
  for (int iter = 0; iter < 3; ++iter) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf == 0.0) break;
    const double u = (normal_cdf(x) - p) / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

// log pmf of Bin(n, p) for i = 0..n, built by the ratio recurrence.
std::vector<double> binomial_log_pmf(std::size_t n, double p) {
  std::vector<double> lp(n + 1);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  lp[0] = static_cast<double>(n) * log_q;
  for (std::size_t i = 1; i <= n; ++i) {
    lp[i] = lp[i - 1] + std::log(static_cast<double>(n - i + 1) / static_cast<double>(i)) +
            log_p - log_q;
  }
  return lp;
}

double sum_exp(const std::vector<double>& lp, std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t i = first; i <= last; ++i) s += std::exp(lp[i]);
  return s;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_sf(double z) noexcept { return 0.5 * std::erfc(z * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p >= 0.5.
  return p < 0.5 ? quantile_lower(p) : -quantile_lower(1.0 - p);
}

PercentileSpec adjusted_percentiles(double p, double epsilon, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be positive");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1)");
  }
  if (epsilon == 0.0) return {p, p, p};

  const double z = normal_quantile(p);
  const double shift = epsilon / sigma;
  PercentileSpec spec{p, normal_cdf(z - shift), normal_cdf(z + shift)};
  if (spec.p_hi >= 1.0 || spec.p_lo <= 0.0) {
    throw RadiusTooLarge("radius too large: eps/sigma = " + std::to_string(shift) +
                         " drives the adjusted percentile to 0 or 1");
  }
  return spec;
}

double binomial_cdf(std::size_t n, double p, std::size_t k) {
  check_probability(p, "binomial p");
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const auto lp = binomial_log_pmf(n, p);
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) < mean) return std::min(1.0, sum_exp(lp, 0, k));
  return std::clamp(1.0 - sum_exp(lp, k + 1, n), 0.0, 1.0);
}

double binomial_sf(std::size_t n, double p, std::size_t k) {
  if (k == 0) return 1.0;
  check_probability(p, "binomial p");
  if (k > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const auto lp = binomial_log_pmf(n, p);
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) > mean) return std::min(1.0, sum_exp(lp, k, n));
  return std::clamp(1.0 - sum_exp(lp, 0, k - 1), 0.0, 1.0);
}

double order_stat_coverage(std::size_t n, double p, std::size_t q, CoverageFormula formula) {
  if (q < 1 || q > n) throw std::invalid_argument("order statistic rank out of range");
  check_probability(p, "coverage p");
  switch (formula) {
    case CoverageFormula::binomial_cdf:
      return binomial_cdf(n, p, q - 1);
    case CoverageFormula::literal_sum: {
      // sum_{i=1}^{q} C(n,i) p^i (1-p)^(n-i)
      const double without_zero = binomial_cdf(n, p, q) - std::pow(1.0 - p, static_cast<double>(n));
      return std::clamp(without_zero, 0.0, 1.0);
    }
  }
  return 0.0;
}

double order_stat_coverage_lower(std::size_t n, double p, std::size_t q,
                                 CoverageFormula formula) {
  if (q < 1 || q > n) throw std::invalid_argument("order statistic rank out of range");
  check_probability(p, "coverage p");
  switch (formula) {
    case CoverageFormula::binomial_cdf:
      return binomial_sf(n, p, q);
    case CoverageFormula::literal_sum:
      // Mirror image of the upper literal sum: reflect values and ranks.
      return order_stat_coverage(n, 1.0 - p, n + 1 - q, CoverageFormula::literal_sum);
  }
  return 0.0;
}

OrderIndices find_order_indices(std::size_t n, const PercentileSpec& spec, double alpha,
                                CoverageFormula formula) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  OrderIndices idx{0, n + 1, n, alpha};

  // Upper coverage is non-decreasing in q: smallest q reaching alpha.
  if (order_stat_coverage(n, spec.p_hi, n, formula) >= alpha) {
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (order_stat_coverage(n, spec.p_hi, mid, formula) >= alpha) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    idx.q_hi = lo;
  }

  // Lower coverage is non-increasing in q: largest q reaching alpha.
  if (order_stat_coverage_lower(n, spec.p_lo, 1, formula) >= alpha) {
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (order_stat_coverage_lower(n, spec.p_lo, mid, formula) >= alpha) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    idx.q_lo = lo;
  }
  return idx;
}

}  // namespace medsmooth
