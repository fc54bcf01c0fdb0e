#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hestonwlse::stats {

double mean(std::span<const double> xs);
// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
double median(std::vector<double> xs);
double correlation(std::span<const double> xs, std::span<const double> ys);

// Jackknife standard error of the sample variance.
double jackknife_variance_se(std::span<const double> xs);
// Jackknife standard error of var(xs) - var(ys) over paired samples.
double jackknife_variance_diff_se(std::span<const double> xs, std::span<const double> ys);

// One-sample Kolmogorov-Smirnov distance to the standard normal CDF.
double ks_statistic_normal(std::vector<double> xs);
// Asymptotic Kolmogorov tail probability P(sqrt(n) D > sqrt(n) d).
double ks_pvalue(double d, std::size_t n);
// 1% critical value 1.63 / sqrt(n) of the asymptotic Kolmogorov law.
double ks_critical_1pct(std::size_t n);

std::vector<std::size_t> histogram(std::span<const double> xs, double lo, double hi,
                                   std::size_t bins);

}  // namespace hestonwlse::stats
