#include "hestonwlse/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hestonwlse {

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void check_args(double alpha, double y) {
  if (!std::isfinite(alpha) || !std::isfinite(y)) {
    throw std::domain_error("upper_incomplete_gamma: non-finite argument");
  }
  if (!(y > 0.0)) throw std::domain_error("upper_incomplete_gamma: requires y > 0");
}

// Modified Lentz evaluation of
//   Gamma(s, y) = e^-y y^s / (y + 1 - s - 1(1 - s) / (y + 3 - s - ...)).
// Converges for any real s once y is not small; used for y >= s + 1.
double gamma_cf(double s, double y) {
  double b = y + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-y + s * std::log(y)) * h;
}

// Lower incomplete gamma gamma(s, y) by its power series, s > 0.
double lower_gamma_series(double s, double y) {
  double ap = s;
  double term = 1.0 / s;
  double sum = term;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= y / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-y + s * std::log(y));
}

double positive_order(double s, double y) {
  if (y >= s + 1.0) return gamma_cf(s, y);
  return std::tgamma(s) - lower_gamma_series(s, y);
}

}  // namespace

double exponential_integral_e1(double y) {
  check_args(0.0, y);
  if (y >= 1.0) return gamma_cf(0.0, y);
  // E1(y) = -gamma - ln y - sum_{k>=1} (-y)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= -y / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(y) - sum;
}

double upper_incomplete_gamma(double alpha, double y) {
  check_args(alpha, y);
  if (alpha > 0.0) return positive_order(alpha, y);

  const double steps_real = std::ceil(-alpha);
  const bool integer_order = (alpha == -steps_real);
  double s;
  double value;
  if (integer_order) {
    s = 0.0;
    value = exponential_integral_e1(y);
  } else {
    s = alpha + steps_real;  // in (0, 1)
    value = positive_order(s, y);
  }
  const double log_y = std::log(y);
  while (s > alpha + 0.5) {
    s -= 1.0;
    value = (value - std::exp(s * log_y - y)) / s;
  }
  return value;
}

RecurrenceResiduals check_recurrences(double alpha, double y) {
  const double g0 = upper_incomplete_gamma(alpha, y);
  const double g1 = upper_incomplete_gamma(alpha + 1.0, y);
  const double g2 = upper_incomplete_gamma(alpha + 2.0, y);
  const double pow_exp = std::exp(alpha * std::log(y) - y);
  return {g1 - pow_exp - alpha * g0, g2 - pow_exp * (y + alpha + 1.0) - alpha * (alpha + 1.0) * g0};
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace hestonwlse
