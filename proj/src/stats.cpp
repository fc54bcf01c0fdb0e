#include "hestonwlse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hestonwlse/special_fn.hpp"

namespace hestonwlse::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return NAN;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return NAN;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double median(std::vector<double> xs) {
  if (xs.empty()) return NAN;
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return NAN;
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Leave-one-out unbiased variances of xs, computed from centred sums.
std::vector<double> loo_variances(std::span<const double> xs) {
  const std::size_t n = xs.size();
  const double m = mean(xs);
  double s1 = 0.0, s2 = 0.0;
  for (double x : xs) {
    s1 += x - m;
    s2 += (x - m) * (x - m);
  }
  std::vector<double> out(n);
  const double k = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = xs[i] - m;
    const double r1 = s1 - d;
    const double r2 = s2 - d * d;
    out[i] = (r2 - r1 * r1 / k) / (k - 1.0);
  }
  return out;
}

double jackknife_se(const std::vector<double>& loo) {
  const double n = static_cast<double>(loo.size());
  const double m = mean(loo);
  double s = 0.0;
  for (double v : loo) s += (v - m) * (v - m);
  return std::sqrt((n - 1.0) / n * s);
}

}  // namespace

double jackknife_variance_se(std::span<const double> xs) {
  if (xs.size() < 3) return NAN;
  return jackknife_se(loo_variances(xs));
}

double jackknife_variance_diff_se(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("paired samples differ in length");
  if (xs.size() < 3) return NAN;
  auto lx = loo_variances(xs);
  const auto ly = loo_variances(ys);
  for (std::size_t i = 0; i < lx.size(); ++i) lx[i] -= ly[i];
  return jackknife_se(lx);
}

double ks_statistic_normal(std::vector<double> xs) {
  if (xs.empty()) return NAN;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std_normal_cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double lambda = std::sqrt(static_cast<double>(n)) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

std::vector<std::size_t> histogram(std::span<const double> xs, double lo, double hi,
                                   std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : xs) {
    if (!(x >= lo && x < hi)) continue;
    auto k = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(k, bins - 1)]++;
  }
  return counts;
}

}  // namespace hestonwlse::stats
