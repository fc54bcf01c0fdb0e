#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hestonwlse/matrix.hpp"
#include "hestonwlse/model.hpp"

namespace hestonwlse {

enum class EstimationErrorKind { SingularGram, ZeroHit, Discretization, InvalidInput };

const char* to_string(EstimationErrorKind kind);

class EstimationError : public std::runtime_error {
 public:
  EstimationError(EstimationErrorKind kind, const std::string& what, std::size_t index = 0)
      : std::runtime_error(what), kind_(kind), index_(index) {}
  EstimationErrorKind kind() const noexcept { return kind_; }
  // Grid index of the offending sample for ZeroHit and Discretization.
  std::size_t index() const noexcept { return index_; }

 private:
  EstimationErrorKind kind_;
  std::size_t index_;
};

// Samples at or below this level count as the variance having hit zero.
inline constexpr double kZeroGuard = 1e-12;

// Left-point sum  sum_{i<n} g(x_i) dt.
template <class G>
double riemann_time_integral(const PathGrid& path, G&& g) {
  const auto& x = path.x();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double v = g(x[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "DiscretizationError: integrand is not finite at grid index " << i;
      throw EstimationError(EstimationErrorKind::Discretization, os.str(), i);
    }
    sum += v;
  }
  return sum * path.dt();
}

enum class Driver { X, Y };

// Ito sum  sum_{i<n} g(x_i) (d_{i+1} - d_i)  with d the X or Y samples. The
// left endpoint is required: any other evaluation point converges to a
// different (Stratonovich-type) integral.
template <class G>
double ito_integral(const PathGrid& path, G&& g, Driver driver) {
  const auto& x = path.x();
  const auto& d = driver == Driver::X ? path.x() : path.y();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double v = g(x[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "DiscretizationError: integrand is not finite at grid index " << i;
      throw EstimationError(EstimationErrorKind::Discretization, os.str(), i);
    }
    sum += v * (d[i + 1] - d[i]);
  }
  return sum;
}

// The integrals entering one pair of 2x2 normal equations, for a weight
// w(x) (1/(x+c) for the WLSE, 1/x for the MLE):
//   gram = [[int w dt, int x w dt], [int x w dt, int x^2 w dt]]
//   u = (int w dX, int x w dX),  v = (int w dY, int x w dY).
struct IntegralSet {
  double time_w = 0.0;
  double time_xw = 0.0;
  double time_x2w = 0.0;
  double dx_w = 0.0;
  double dx_xw = 0.0;
  double dy_w = 0.0;
  double dy_xw = 0.0;
  double horizon = 0.0;
};

struct QuadEstimate {
  double a_hat = 0.0;
  double b_hat = 0.0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  Mat2 gram;
  double u[2] = {0.0, 0.0};
  double v[2] = {0.0, 0.0};
  double t_end = 0.0;
  IntegralSet integrals;
};

IntegralSet wlse_integrals(const PathGrid& path, double c);
IntegralSet mle_integrals(const PathGrid& path);

// Solves gram (a, b)' = u and gram (alpha, beta)' = v by closed-form
// inversion. Throws SingularGram when |det| < 1e-12 * gram00 * gram11.
QuadEstimate solve_normal_equations(const IntegralSet& integrals);

// Weighted least squares estimate with weights 1/(X_t + c). No zero guard is
// needed: the weights are bounded by 1/c.
QuadEstimate wlse(const PathGrid& path, double c);

// Maximum likelihood estimate; throws ZeroHit if any x_i <= kZeroGuard.
QuadEstimate mle(const PathGrid& path);

// Single-parameter estimators with the other drift parameter known.
double wlse_b_known_a(const PathGrid& path, double c, double a);
double wlse_a_known_b(const PathGrid& path, double c, double b);
double mle_b_known_a(const PathGrid& path, double a);
double mle_a_known_b(const PathGrid& path, double b);

// Index of the first sample at or below kZeroGuard, or path.size() if none.
std::size_t first_zero_hit(const PathGrid& path);

}  // namespace hestonwlse
