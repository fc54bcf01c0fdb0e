#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hestonwlse {

// Drift and correlation parameters of the two-factor system
//   dX = (a + bX) dt + 2 sqrt(X) dB
//   dY = (alpha + beta X) dt + 2 sqrt(X) (rho dB + sqrt(1 - rho^2) dW)
struct HestonParams {
  double a = 1.0;
  double b = -2.0;
  double alpha = 0.0;
  double beta = -0.5;
  double rho = -0.7;

  bool operator==(const HestonParams&) const = default;
};

enum class ParamViolation { NonPositiveA, NonNegativeB, RhoOutOfRange, NonFinite };

const char* to_string(ParamViolation v);

class ParamError : public std::invalid_argument {
 public:
  ParamError(ParamViolation violation, const std::string& what)
      : std::invalid_argument(what), violation_(violation) {}
  ParamViolation violation() const noexcept { return violation_; }

 private:
  ParamViolation violation_;
};

// Returns `params` unchanged when a > 0, b < 0 and |rho| < 1; throws ParamError otherwise.
HestonParams validate(const HestonParams& params);

// E[X] = -a/b under the stationary law.
double stationary_mean(const HestonParams& params);

// Gamma(shape = a/2, rate = -b/2), the limit law of X_t.
struct StationaryLaw {
  double shape;
  double rate;

  static StationaryLaw from(const HestonParams& params);

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  double density(double x) const;
  double log_density(double x) const;
};

// Number of uniform steps of size dt that fit in [0, t_end]. Ratios within
// 1e-9 of an integer are snapped so that e.g. 70 / 0.01 gives 7000.
std::size_t grid_steps(double dt, double t_end);

// Trajectory sampled on the uniform grid t_i = i * dt, i = 0..n.
class PathGrid {
 public:
  PathGrid(double dt, double t_end, std::vector<double> x, std::vector<double> y);

  double dt() const noexcept { return dt_; }
  double t_end() const noexcept { return t_end_; }
  // Horizon actually covered by the grid, steps() * dt.
  double grid_horizon() const noexcept { return static_cast<double>(steps()) * dt_; }
  std::size_t size() const noexcept { return x_.size(); }
  std::size_t steps() const noexcept { return x_.size() - 1; }
  double x0() const { return x_.front(); }
  double y0() const { return y_.front(); }
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }

  // Prefix of the path covering [0, t_end].
  PathGrid truncated(double t_end) const;

 private:
  double dt_;
  double t_end_;
  std::vector<double> x_;
  std::vector<double> y_;
};

}  // namespace hestonwlse
