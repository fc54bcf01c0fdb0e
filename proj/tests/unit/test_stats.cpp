#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hestonwlse/stats.hpp"

using namespace hestonwlse;

TEST_CASE("basic moments") {
  const std::vector<double> x{1.0, 2.0, 4.0, 7.0, 11.0};
  const std::vector<double> y{2.0, 1.0, 5.0, 5.0, 10.0};
  CHECK(stats::mean(x) == 5.0);
  CHECK(stats::variance(x) == doctest::Approx(16.5));
  CHECK(stats::median(x) == 4.0);
  CHECK(stats::median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(stats::correlation(x, y) == doctest::Approx(0.9476309590709878).epsilon(1e-13));
}

TEST_CASE("jackknife standard errors") {
  const std::vector<double> x{1.0, 2.0, 4.0, 7.0, 11.0};
  const std::vector<double> y{2.0, 1.0, 5.0, 5.0, 10.0};
  CHECK(stats::jackknife_variance_se(x) == doctest::Approx(10.400320507881796).epsilon(1e-12));
  CHECK(stats::jackknife_variance_diff_se(x, y) == doctest::Approx(3.8522720568516444).epsilon(1e-12));
  CHECK(stats::jackknife_variance_diff_se(x, x) == 0.0);

  // Large normal sample: se(var) -> sigma^2 sqrt(2/n).
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<double> z(20000);
  for (auto& v : z) v = n(gen);
  CHECK(stats::jackknife_variance_se(z) == doctest::Approx(4.0 * std::sqrt(2.0 / 20000)).epsilon(0.05));
}

TEST_CASE("Kolmogorov-Smirnov against the standard normal") {
  CHECK(stats::ks_statistic_normal({-1.2, 0.3, 0.5, 2.0, -0.1, 0.9}) ==
        doctest::Approx(0.2935054960563044).epsilon(1e-12));
  CHECK(stats::ks_pvalue(1.63 / 10.0, 100) == doctest::Approx(0.009846364888486529).epsilon(1e-8));
  CHECK(stats::ks_pvalue(0.5, 100) == doctest::Approx(3.8574996959278356e-22).epsilon(1e-6));
  CHECK(stats::ks_critical_1pct(400) == doctest::Approx(1.63 / 20.0));

  std::mt19937_64 gen(8);
  std::normal_distribution<double> n01;
  std::vector<double> z(5000), shifted(5000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = n01(gen);
    shifted[i] = z[i] + 0.2;
  }
  CHECK(stats::ks_statistic_normal(z) < stats::ks_critical_1pct(z.size()));
  CHECK(stats::ks_statistic_normal(shifted) > stats::ks_critical_1pct(z.size()));
}

TEST_CASE("histogram counts in-range values only") {
  const std::vector<double> x{-5.0, -0.9, -0.1, 0.0, 0.4, 0.99, 1.0, 3.0};
  const auto h = stats::histogram(x, -1.0, 1.0, 4);
  REQUIRE(h.size() == 4);
  CHECK(h[0] == 1);
  CHECK(h[1] == 1);
  CHECK(h[2] == 2);
  CHECK(h[3] == 1);
}
