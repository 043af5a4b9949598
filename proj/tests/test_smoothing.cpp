#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "medsmooth/smoothing.hpp"
#include "oracles.hpp"

using namespace medsmooth;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("median takes the floor(n/2) sorted element") {
  CHECK(median_of_samples(SampleSet({1, 5, 3})) == 3);
  CHECK(median_of_samples(SampleSet({1, 2, 3, 4})) == 3);
  CHECK(median_of_samples(SampleSet({7})) == 7);
  CHECK(median_rank(1) == 1);
  CHECK(median_rank(2000) == 1001);
}

TEST_CASE("sample sets reject empty and NaN input") {
  CHECK_THROWS_AS(SampleSet({}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSet({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("sentinels sort above finite values and out-of-range ranks are infinite") {
  const SampleSet s({kInf, 2.0, -1.0});
  CHECK(s.values()[0] == -1.0);
  CHECK(s.values()[2] == kInf);
  CHECK(s.order_statistic(0) == -kInf);
  CHECK(s.order_statistic(4) == kInf);
  CHECK(s.order_statistic(2) == 2.0);
  CHECK(s.contains(2.0));
  CHECK_FALSE(s.contains(3.0));
}

TEST_CASE("constant samples give collapsed bounds") {
  const SampleSet s(std::vector<double>(500, 4.25));
  const auto b = empirical_percentile_bounds(s, 0.36, 0.25, 0.999);
  CHECK(b.lower == 4.25);
  CHECK(b.median == 4.25);
  CHECK(b.upper == 4.25);
}

TEST_CASE("all-sentinel samples are certifiably absent") {
  const SampleSet s(std::vector<double>(300, kInf));
  const auto b = empirical_percentile_bounds(s, 0.36, 0.25, 0.999);
  CHECK(b.lower == kInf);
  CHECK(b.median == kInf);
  CHECK(b.upper == kInf);
  CHECK(b.certifiably_absent());
  CHECK(b.possibly_absent());
}

TEST_CASE("unreachable ranks give infinite bounds") {
  const SampleSet s(normal_draws(20, 3));
  const auto b = empirical_percentile_bounds(s, 0.36, 0.25, 0.99999);
  CHECK(b.lower == -kInf);
  CHECK(b.upper == kInf);
  CHECK(std::isfinite(b.median));
  CHECK(b.possibly_absent());
  CHECK_FALSE(b.certifiably_absent());
}

TEST_CASE("radius too large propagates") {
  const SampleSet s(normal_draws(100, 1));
  CHECK_THROWS_AS(empirical_percentile_bounds(s, 10.0, 0.25, 0.99), RadiusTooLarge);
}

TEST_CASE("gaussian bounds sit near the closed-form quantiles") {
  // 2000 N(0,1) draws at the operating point. Order statistic K_q estimates
  // Phi^-1(q / n) with standard error about sqrt(p(1-p)/n) / pdf.
  const auto draws = normal_draws(2000, 11);
  const SampleSet s(draws);
  const auto b = empirical_percentile_bounds(s, 0.36, 0.25, 0.99999);
  REQUIRE(b.indices.q_lo == 102);
  REQUIRE(b.indices.q_hi == 1899);
  const double p_lo = oracle::phi_cdf(-1.44);
  const double z_lo = -1.44;  // quantile of p_lo
  const double pdf = std::exp(-0.5 * z_lo * z_lo) / std::sqrt(2.0 * M_PI);
  const double se = std::sqrt(p_lo * (1 - p_lo) / 2000.0) / pdf;
  // Confidence margin: q_lo/n sits about 4 binomial sd below p_lo.
  CHECK(b.lower < z_lo);
  CHECK(b.lower > z_lo - 8.0 * se);
  CHECK(b.upper > -z_lo);
  CHECK(b.upper < -z_lo + 8.0 * se);
  CHECK(std::abs(b.median) < 4.0 * std::sqrt(0.25 / 2000.0) / 0.3989);
}

TEST_CASE("bounds are realizable and ordered") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    auto v = normal_draws(n, rng());
    for (std::size_t i = 0; i < n; i += 3) v[i] = std::round(v[i] * 2.0);  // ties
    if (trial % 4 == 0) {
      for (std::size_t i = 0; i < n; i += 5) v[i] = kInf;
    }
    const SampleSet s(v);
    const double alpha = 0.3 + 0.69 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto b = empirical_percentile_bounds(s, 0.1, 0.25, alpha);
    CHECK(b.lower <= b.median);
    CHECK(b.median <= b.upper);
    CHECK(s.contains(b.median));
    if (b.indices.q_lo >= 1) CHECK(s.contains(b.lower));
    if (b.indices.q_hi <= n) CHECK(s.contains(b.upper));
  }
}

TEST_CASE("bounds widen with radius, confidence and fewer samples") {
  const auto draws = normal_draws(1000, 21);
  const SampleSet s(draws);
  const SampleSet half(std::vector<double>(draws.begin(), draws.begin() + 500));
  double prev_lo = 0.0;
  double prev_hi = 0.0;
  for (double eps : {0.0, 0.05, 0.1, 0.2, 0.36, 0.5}) {
    const auto b = empirical_percentile_bounds(s, eps, 0.25, 0.99);
    CHECK(b.lower <= prev_lo);
    CHECK(b.upper >= prev_hi);
    prev_lo = b.lower;
    prev_hi = b.upper;
  }
  const auto a1 = empirical_percentile_bounds(s, 0.2, 0.25, 0.9);
  const auto a2 = empirical_percentile_bounds(s, 0.2, 0.25, 0.999);
  CHECK(a2.lower <= a1.lower);
  CHECK(a2.upper >= a1.upper);
  // Fewer samples widen the ranks; compare coverage-equivalent ranks.
  const auto r_full = find_order_indices(1000, adjusted_percentiles(0.5, 0.2, 0.25), 0.99);
  const auto r_half = find_order_indices(500, adjusted_percentiles(0.5, 0.2, 0.25), 0.99);
  CHECK(static_cast<double>(r_half.q_lo) / 500 <= static_cast<double>(r_full.q_lo) / 1000);
  CHECK(static_cast<double>(r_half.q_hi) / 500 >= static_cast<double>(r_full.q_hi) / 1000);
}

TEST_CASE("mean smoothing bound examples") {
  const auto zero = mean_smoothing_bounds(0.3, 0.0, 1.0, 0.0, 0.25);
  CHECK(zero.first == 0.3);
  CHECK(zero.second == 0.3);

  const auto at_l = mean_smoothing_bounds(0.0, 0.0, 1.0, 0.1, 0.25);
  CHECK(at_l.first == 0.0);

  const auto mid = mean_smoothing_bounds(0.5, 0.0, 1.0, 0.25, 0.25);
  CHECK(mid.first == Catch::Approx(oracle::phi_cdf(-1.0)).epsilon(1e-12));
  CHECK(mid.second == Catch::Approx(oracle::phi_cdf(1.0)).epsilon(1e-12));
  CHECK(std::abs(mid.first - 0.1587) < 1e-4);
  CHECK(std::abs(mid.second - 0.8413) < 1e-4);

  // Shifted and scaled range.
  const auto scaled = mean_smoothing_bounds(1.0, -1.0, 3.0, 0.25, 0.25);
  CHECK(scaled.first == Catch::Approx(-1.0 + 4.0 * oracle::phi_cdf(-1.0)));

  CHECK_THROWS_AS(mean_smoothing_bounds(0.5, 1.0, 1.0, 0.1, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(mean_smoothing_bounds(2.0, 0.0, 1.0, 0.1, 0.25), std::invalid_argument);
}

TEST_CASE("compare smoothing on a step function") {
  const auto step = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
  const std::vector<double> grid{0.0, 1.0};
  const auto rows = compare_smoothing(step, grid, 0.5, 100000, 7);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].mean - 0.5) < 0.01);
  CHECK((rows[0].median == 0.0 || rows[0].median == 1.0));
  // Phi(2) = 0.97725
  CHECK(std::abs(rows[1].mean - oracle::phi_cdf(2.0)) < 0.003);
  CHECK(rows[1].median == 1.0);

  const auto again = compare_smoothing(step, grid, 0.5, 100000, 7);
  CHECK(again[0].mean == rows[0].mean);
  CHECK(again[1].median == rows[1].median);
}

TEST_CASE("compare smoothing keeps discrete outputs discrete") {
  const auto stairs = [](double x) { return std::floor(2.0 * x); };
  std::vector<double> grid;
  for (double x = -2.0; x <= 2.0; x += 0.05) grid.push_back(x);
  const auto rows = compare_smoothing(stairs, grid, 0.3, 2000, 3);
  bool mean_intermediate = false;
  for (const auto& r : rows) {
    CHECK(r.median == std::floor(r.median));
    if (r.mean != std::floor(r.mean)) mean_intermediate = true;
  }
  CHECK(mean_intermediate);

  const auto constant = compare_smoothing([](double) { return 2.5; }, grid, 0.3, 50, 1);
  for (const auto& r : constant) {
    CHECK(r.mean == 2.5);
    CHECK(r.median == 2.5);
  }
}

TEST_CASE("gaussian draws are reproducible and scaled") {
  const auto a = gaussian_draws(0.5, 1000, 9);
  const auto b = gaussian_draws(0.5, 1000, 9);
  CHECK(a == b);
  CHECK(a != gaussian_draws(0.5, 1000, 10));
  double ss = 0.0;
  for (double v : a) ss += v * v;
  CHECK(std::sqrt(ss / 1000.0) == Catch::Approx(0.5).margin(0.05));
}
