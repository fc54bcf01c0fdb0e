#include "hestonwlse/estimators.hpp"

namespace hestonwlse {

namespace {

constexpr double kDetGuard = 1e-12;

void require_length(const PathGrid& path) {
  if (path.size() < 3) {
    throw EstimationError(EstimationErrorKind::InvalidInput,
                          "InvalidInput: estimation requires at least 3 grid points");
  }
}

void require_positive_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw EstimationError(EstimationErrorKind::InvalidInput,
                          "InvalidInput: weighting constant c must be positive and finite");
  }
}

void require_no_zero(const PathGrid& path) {
  const std::size_t hit = first_zero_hit(path);
  if (hit < path.size()) {
    std::ostringstream os;
    os << "ZeroHit: variance path reaches zero at grid index " << hit << " (t = "
       << static_cast<double>(hit) * path.dt() << ")";
    throw EstimationError(EstimationErrorKind::ZeroHit, os.str(), hit);
  }
}

// One pass over the path for a weight function w.
template <class W>
IntegralSet assemble(const PathGrid& path, W&& w) {
  const auto& x = path.x();
  const auto& y = path.y();
  IntegralSet s;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double wi = w(x[i]);
    const double xwi = x[i] * wi;
    if (!std::isfinite(wi) || !std::isfinite(xwi)) {
      std::ostringstream os;
      os << "DiscretizationError: weight is not finite at grid index " << i;
      throw EstimationError(EstimationErrorKind::Discretization, os.str(), i);
    }
    const double dx = x[i + 1] - x[i];
    const double dy = y[i + 1] - y[i];
    s.time_w += wi;
    s.time_xw += xwi;
    s.time_x2w += x[i] * xwi;
    s.dx_w += wi * dx;
    s.dx_xw += xwi * dx;
    s.dy_w += wi * dy;
    s.dy_xw += xwi * dy;
  }
  s.time_w *= path.dt();
  s.time_xw *= path.dt();
  s.time_x2w *= path.dt();
  s.horizon = path.grid_horizon();
  return s;
}

}  // namespace

const char* to_string(EstimationErrorKind kind) {
  switch (kind) {
    case EstimationErrorKind::SingularGram:
      return "SingularGram";
    case EstimationErrorKind::ZeroHit:
      return "ZeroHit";
    case EstimationErrorKind::Discretization:
      return "DiscretizationError";
    case EstimationErrorKind::InvalidInput:
      return "InvalidInput";
  }
  return "Unknown";
}

std::size_t first_zero_hit(const PathGrid& path) {
  const auto& x = path.x();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= kZeroGuard) return i;
  }
  return x.size();
}

IntegralSet wlse_integrals(const PathGrid& path, double c) {
  require_length(path);
  require_positive_c(c);
  return assemble(path, [c](double x) { return 1.0 / (x + c); });
}

IntegralSet mle_integrals(const PathGrid& path) {
  require_length(path);
  require_no_zero(path);
  return assemble(path, [](double x) { return 1.0 / x; });
}

QuadEstimate solve_normal_equations(const IntegralSet& s) {
  QuadEstimate e;
  e.gram = make_mat2(s.time_w, s.time_xw, s.time_xw, s.time_x2w);
  e.u[0] = s.dx_w;
  e.u[1] = s.dx_xw;
  e.v[0] = s.dy_w;
  e.v[1] = s.dy_xw;
  e.t_end = s.horizon;
  e.integrals = s;

  const double det = e.gram.det();
  const double scale = std::abs(e.gram(0, 0) * e.gram(1, 1));
  if (!(std::abs(det) >= kDetGuard * scale) || scale == 0.0) {
    std::ostringstream os;
    os << "SingularGram: |det| = " << std::abs(det) << " below " << kDetGuard
       << " x diagonal product " << scale;
    throw EstimationError(EstimationErrorKind::SingularGram, os.str());
  }
  const Mat2 inv = inverse(e.gram);
  e.a_hat = inv(0, 0) * e.u[0] + inv(0, 1) * e.u[1];
  e.b_hat = inv(1, 0) * e.u[0] + inv(1, 1) * e.u[1];
  e.alpha_hat = inv(0, 0) * e.v[0] + inv(0, 1) * e.v[1];
  e.beta_hat = inv(1, 0) * e.v[0] + inv(1, 1) * e.v[1];
  return e;
}

QuadEstimate wlse(const PathGrid& path, double c) {
  return solve_normal_equations(wlse_integrals(path, c));
}

QuadEstimate mle(const PathGrid& path) { return solve_normal_equations(mle_integrals(path)); }

namespace {

double checked_ratio(double num, double den, const char* what) {
  if (!(std::abs(den) > 0.0) || !std::isfinite(den)) {
    throw EstimationError(EstimationErrorKind::SingularGram,
                          std::string("SingularGram: zero denominator in ") + what);
  }
  return num / den;
}

}  // namespace

double wlse_b_known_a(const PathGrid& path, double c, double a) {
  const IntegralSet s = wlse_integrals(path, c);
  return checked_ratio(s.dx_xw - a * s.time_xw, s.time_x2w, "wlse_b_known_a");
}

double wlse_a_known_b(const PathGrid& path, double c, double b) {
  const IntegralSet s = wlse_integrals(path, c);
  return checked_ratio(s.dx_w - b * s.time_xw, s.time_w, "wlse_a_known_b");
}

double mle_b_known_a(const PathGrid& path, double a) {
  require_length(path);
  const double increment = ito_integral(path, [](double) { return 1.0; }, Driver::X);
  const double time_x = riemann_time_integral(path, [](double x) { return x; });
  return checked_ratio(increment - a * path.grid_horizon(), time_x, "mle_b_known_a");
}

double mle_a_known_b(const PathGrid& path, double b) {
  const IntegralSet s = mle_integrals(path);
  return checked_ratio(s.dx_w - b * s.horizon, s.time_w, "mle_a_known_b");
}

}  // namespace hestonwlse
