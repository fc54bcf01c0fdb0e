#include "hestonwlse/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "hestonwlse/special_fn.hpp"

namespace hestonwlse {

namespace {

constexpr double kPhiGuard = 1e-14;
constexpr double kRouteTolerance = 1e-9;

}  // namespace

WeightConfig validate(const WeightConfig& config) {
  if (!(config.c > 0.0) || !std::isfinite(config.c)) {
    std::ostringstream os;
    os << "weighting constant c must be positive and finite, got " << config.c;
    throw std::invalid_argument(os.str());
  }
  return config;
}

AsymCoefficients psi(const HestonParams& params, const WeightConfig& config) {
  validate(params);
  validate(config);
  const double a = params.a, b = params.b, c = config.c;
  const double y = -b * c / 2.0;
  // y^(a/2) e^y Gamma(1 - a/2, y); combine the exponentials in log space.
  const double gamma = upper_incomplete_gamma(1.0 - a / 2.0, y);
  const double psi_c = std::exp(a / 2.0 * std::log(y) + y) * gamma;
  const double phi_c = psi_c * (1.0 - a / (b * c)) - 1.0;
  return {psi_c, phi_c};
}

MomentSet moments(const HestonParams& params, const WeightConfig& config) {
  const auto [psi_c, phi_c] = psi(params, config);
  (void)phi_c;
  const double a = params.a, b = params.b, c = config.c;
  const double mean = stationary_mean(params);

  MomentSet m{};
  m.e_inv_c = psi_c / c;
  m.e_x_c = 1.0 - psi_c;
  // X^2 / C = X - c + c^2 / C
  m.e_x2_c = mean - c + c * c * m.e_inv_c;
  // Integration by parts against the Gamma(a/2, -b/2) density.
  m.e_x_c2 = a / 2.0 * m.e_inv_c + b / 2.0 * m.e_x_c;
  m.e_x2_c2 = ((a + 2.0) * m.e_x_c + b * m.e_x2_c) / 2.0;
  // X^3 = X (X + c)^2 - 2c X^2 - c^2 X
  m.e_x3_c2 = mean - 2.0 * c * m.e_x2_c2 - c * c * m.e_x_c2;
  return m;
}

MomentSet moments_closed_form(const HestonParams& params, const WeightConfig& config) {
  const double p = psi(params, config).psi_c;
  const double a = params.a, b = params.b, c = config.c;
  MomentSet m{};
  m.e_inv_c = p / c;
  m.e_x_c = 1.0 - p;
  m.e_x2_c = c * (p - 1.0) - a / b;
  m.e_x_c2 = a / (2.0 * c) * p + b / 2.0 * (1.0 - p);
  m.e_x2_c2 = ((a + 2.0 - b * c) * (1.0 - p) - a) / 2.0;
  m.e_x3_c2 = c / 2.0 * (a + 4.0 - b * c) * p - 2.0 * c + b * c * c / 2.0 - a / b;
  return m;
}

MatrixForms matrix_A(const MomentSet& m, const HestonParams& params, const WeightConfig& config) {
  const auto [p, phi] = psi(params, config);
  if (!(phi > kPhiGuard)) {
    std::ostringstream os;
    os << "SingularGram: phi_c = " << phi << " is not above " << kPhiGuard;
    throw AsymptoticsError(AsymptoticsErrorKind::SingularGram, os.str());
  }
  const double a = params.a, b = params.b, c = config.c;
  const Mat2 gram = make_mat2(m.e_inv_c, m.e_x_c, m.e_x_c, m.e_x2_c);
  const double det = gram.det();
  if (!(det > kPhiGuard * m.e_inv_c * m.e_x2_c)) {
    throw AsymptoticsError(AsymptoticsErrorKind::SingularGram,
                           "SingularGram: stationary Gram matrix is not positive definite");
  }
  MatrixForms out;
  out.moment_form = inverse(gram);
  out.closed_form = (1.0 / phi) * make_mat2(c * (p - 1.0) - a / b, p - 1.0, p - 1.0, p / c);
  out.discrepancy = max_rel_diff(out.moment_form, out.closed_form);
  return out;
}

MatrixForms matrix_L(const MomentSet& m, const HestonParams& params, const WeightConfig& config) {
  const double p = psi(params, config).psi_c;
  const double a = params.a, b = params.b, c = config.c;
  MatrixForms out;
  out.moment_form = make_mat2(m.e_x_c2, m.e_x2_c2, m.e_x2_c2, m.e_x3_c2);
  const double off = (a + 2.0 - b * c) * (1.0 - p) - a;
  out.closed_form =
      0.5 * make_mat2(a / c * p + b * (1.0 - p), off, off,
                      p * c * (a + 4.0 - b * c) - 4.0 * c + b * c * c - 2.0 * a / b);
  out.discrepancy = max_rel_diff(out.moment_form, out.closed_form);
  return out;
}

SigmaEntries sigma_entries(const HestonParams& params, const WeightConfig& config) {
  const auto [p, phi] = psi(params, config);
  const double a = params.a, b = params.b, c = config.c;
  const MomentSet m = moments(params, config);
  const Mat2 A = matrix_A(m, params, config).moment_form;
  const Mat2 L = matrix_L(m, params, config).moment_form;

  SigmaEntries s{};
  s.sigma12 = (p - 1.0) * (p - 1.0) - a / 2.0 * phi;
  s.sigma11 = a / b * s.sigma12;
  s.sigma22 = p / c * (phi + p - 1.0 + a / 2.0) + b / 2.0 * (1.0 - p);
  s.ala = (1.0 / (phi * phi)) * make_mat2(s.sigma11, s.sigma12, s.sigma12, s.sigma22);
  s.product = A * L * A;
  // Exact arithmetic gives a symmetric product; remove the rounding skew.
  s.product(0, 1) = s.product(1, 0) = 0.5 * (s.product(0, 1) + s.product(1, 0));
  s.product_discrepancy = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double scale = std::max(std::abs(s.ala.v[k]), std::abs(s.product.v[k]));
    if (scale > 0.0) {
      s.product_discrepancy =
          std::max(s.product_discrepancy, std::abs(s.ala.v[k] - s.product.v[k]) / scale);
    }
  }
  return s;
}

namespace {

Mat4 assemble_lambda(const Mat2& ala, double rho) {
  Mat4 out;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      out(i, j) = ala(i, j);
      out(i + 2, j + 2) = ala(i, j);
      out(i, j + 2) = rho * ala(i, j);
      out(i + 2, j) = rho * ala(i, j);
    }
  }
  return out;
}

}  // namespace

Mat4 lambda(const HestonParams& params, const WeightConfig& config) {
  return assemble_lambda(sigma_entries(params, config).product, params.rho);
}

Mat2 mle_sigma(const HestonParams& params) {
  validate(params);
  if (!(params.a > 2.0)) {
    std::ostringstream os;
    os << "MLE covariance requires a > 2, got a = " << params.a;
    throw AsymptoticsError(AsymptoticsErrorKind::Domain, os.str());
  }
  const double a = params.a, b = params.b;
  return make_mat2(-b / (a - 2.0), 1.0, 1.0, -a / b);
}

Mat2 mle_covariance_limit(const HestonParams& params) { return inverse(mle_sigma(params)); }

SingleParamVariances single_param_variances(const HestonParams& params,
                                            const WeightConfig& config) {
  const MomentSet m = moments(params, config);
  SingleParamVariances v{};
  v.var_b_wlse = 4.0 * m.e_x3_c2 / (m.e_x2_c * m.e_x2_c);
  v.var_a_wlse = 4.0 * m.e_x_c2 / (m.e_inv_c * m.e_inv_c);
  v.var_b_mle = 4.0 / stationary_mean(params);
  if (params.a > 2.0) v.var_a_mle = 4.0 * (params.a - 2.0) / (-params.b);
  return v;
}

AsymCovariance asymptotic_covariance(const HestonParams& params, const WeightConfig& config) {
  AsymCovariance out;
  out.coefficients = psi(params, config);
  out.moments = moments(params, config);
  out.a_forms = matrix_A(out.moments, params, config);
  out.l_forms = matrix_L(out.moments, params, config);
  for (const auto* forms : {&out.a_forms, &out.l_forms}) {
    if (forms->discrepancy > kRouteTolerance) {
      std::ostringstream os;
      os << "ConsistencyMismatch: moment and closed forms differ by " << forms->discrepancy;
      throw AsymptoticsError(AsymptoticsErrorKind::ConsistencyMismatch, os.str());
    }
  }
  out.sigma = sigma_entries(params, config);
  out.A = out.a_forms.moment_form;
  out.L = out.l_forms.moment_form;
  out.ALA = out.sigma.product;
  out.Lambda = assemble_lambda(out.ALA, params.rho);
  if (params.a > 2.0) out.sigma_inv_limit = mle_covariance_limit(params);
  return out;
}

}  // namespace hestonwlse
