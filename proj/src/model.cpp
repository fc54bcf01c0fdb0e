#include "hestonwlse/model.hpp"

#include <cmath>
#include <sstream>

namespace hestonwlse {

const char* to_string(ParamViolation v) {
  switch (v) {
    case ParamViolation::NonPositiveA:
      return "NonPositiveA";
    case ParamViolation::NonNegativeB:
      return "NonNegativeB";
    case ParamViolation::RhoOutOfRange:
      return "RhoOutOfRange";
    case ParamViolation::NonFinite:
      return "NonFinite";
  }
  return "Unknown";
}

HestonParams validate(const HestonParams& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.beta) || !std::isfinite(p.rho)) {
    throw ParamError(ParamViolation::NonFinite, "parameters must be finite");
  }
  if (!(p.a > 0.0)) {
    std::ostringstream os;
    os << "NonPositiveA: a must be > 0, got " << p.a;
    throw ParamError(ParamViolation::NonPositiveA, os.str());
  }
  if (!(p.b < 0.0)) {
    std::ostringstream os;
    os << "NonNegativeB: b must be < 0 (subcritical regime), got " << p.b;
    throw ParamError(ParamViolation::NonNegativeB, os.str());
  }
  if (!(p.rho > -1.0 && p.rho < 1.0)) {
    std::ostringstream os;
    os << "RhoOutOfRange: rho must lie in (-1, 1), got " << p.rho;
    throw ParamError(ParamViolation::RhoOutOfRange, os.str());
  }
  return p;
}

double stationary_mean(const HestonParams& params) { return -params.a / params.b; }

StationaryLaw StationaryLaw::from(const HestonParams& params) {
  validate(params);
  return {params.a / 2.0, -params.b / 2.0};
}

double StationaryLaw::log_density(double x) const {
  if (!(x > 0.0)) return -INFINITY;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double StationaryLaw::density(double x) const {
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_density(x));
}

std::size_t grid_steps(double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end > 0.0) || !std::isfinite(dt) || !std::isfinite(t_end)) {
    throw std::invalid_argument("grid_steps: dt and t_end must be positive and finite");
  }
  const double q = t_end / dt;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(q));
}

PathGrid::PathGrid(double dt, double t_end, std::vector<double> x, std::vector<double> y)
    : dt_(dt), t_end_(t_end), x_(std::move(x)), y_(std::move(y)) {
  if (!(dt > 0.0) || !(dt <= t_end)) {
    throw std::invalid_argument("PathGrid: require 0 < dt <= t_end");
  }
  const std::size_t expected = grid_steps(dt, t_end) + 1;
  if (x_.size() != expected || y_.size() != expected) {
    std::ostringstream os;
    os << "PathGrid: expected " << expected << " samples, got x=" << x_.size()
       << " y=" << y_.size();
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] >= 0.0) || !std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
      std::ostringstream os;
      os << "PathGrid: invalid sample at index " << i << " (x=" << x_[i] << ", y=" << y_[i]
         << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

PathGrid PathGrid::truncated(double t_end) const {
  const std::size_t n = grid_steps(dt_, t_end);
  if (n > steps()) throw std::invalid_argument("PathGrid::truncated: horizon beyond path");
  return PathGrid(dt_, t_end, std::vector<double>(x_.begin(), x_.begin() + n + 1),
                  std::vector<double>(y_.begin(), y_.begin() + n + 1));
}

}  // namespace hestonwlse
