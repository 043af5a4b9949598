// Scalar statistics behind the percentile certificates: the standard normal
// CDF and quantile, the adjusted percentiles for an l2 radius, and binomial
// coverage of order statistics.
#pragma once

#include <cstddef>
#include <stdexcept>

namespace medsmooth {

/// Raised when eps/sigma pushes an adjusted percentile to 0 or 1, so no
/// finite order statistic can bound it.
class RadiusTooLarge : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double normal_cdf(double z) noexcept;
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z) noexcept;
/// Inverse of normal_cdf on (0, 1). Throws std::invalid_argument otherwise.
double normal_quantile(double p);

struct PercentileSpec {
  double p = 0.5;
  double p_lo = 0.5;
  double p_hi = 0.5;
};

/// p_lo = Phi(Phi^-1(p) - eps/sigma), p_hi = Phi(Phi^-1(p) + eps/sigma).
PercentileSpec adjusted_percentiles(double p, double epsilon, double sigma);

/// Which sum is used for order-statistic coverage.
///
/// `binomial_cdf` is P(Bin(n, p) <= q - 1), the probability that the q-th
/// smallest of n draws lies at or above the p-quantile. `literal_sum` is the
/// sum over i = 1..q of the binomial pmf; it is kept only for comparison and
/// fails the empirical coverage check.
enum class CoverageFormula { binomial_cdf, literal_sum };

/// Probability that K_q (1-based) is an upper bound for the p-quantile.
double order_stat_coverage(std::size_t n, double p, std::size_t q,
                           CoverageFormula formula = CoverageFormula::binomial_cdf);

/// Probability that K_q (1-based) is a lower bound for the p-quantile.
double order_stat_coverage_lower(std::size_t n, double p, std::size_t q,
                                 CoverageFormula formula = CoverageFormula::binomial_cdf);

/// Ranks of the order statistics used as bounds. Rank 0 stands for -inf and
/// rank n + 1 for +inf.
struct OrderIndices {
  std::size_t q_lo = 0;
  std::size_t q_hi = 0;
  std::size_t n = 0;
  double alpha = 0.0;

  bool lower_unbounded() const noexcept { return q_lo == 0; }
  bool upper_unbounded() const noexcept { return q_hi == n + 1; }
};

/// Smallest q_hi and largest q_lo reaching coverage alpha, by binary search.
OrderIndices find_order_indices(std::size_t n, const PercentileSpec& spec, double alpha,
                                CoverageFormula formula = CoverageFormula::binomial_cdf);

/// P(Bin(n, p) <= k), summed in log space.
double binomial_cdf(std::size_t n, double p, std::size_t k);
/// P(Bin(n, p) >= k).
double binomial_sf(std::size_t n, double p, std::size_t k);

}  // namespace medsmooth
