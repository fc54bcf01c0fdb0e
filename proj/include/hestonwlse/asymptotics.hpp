#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "hestonwlse/matrix.hpp"
#include "hestonwlse/model.hpp"

namespace hestonwlse {

// Weighting constant c > 0 of the estimator weights 1 / (X_t + c).
struct WeightConfig {
  double c = 1.0;

  bool operator==(const WeightConfig&) const = default;
};

WeightConfig validate(const WeightConfig& config);

enum class AsymptoticsErrorKind { SingularGram, ConsistencyMismatch, Domain };

class AsymptoticsError : public std::runtime_error {
 public:
  AsymptoticsError(AsymptoticsErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AsymptoticsErrorKind kind() const noexcept { return kind_; }

 private:
  AsymptoticsErrorKind kind_;
};

// psi_c = c E[1/C] and phi_c = E[C] E[1/C] - 1, with C = X + c and X stationary.
struct AsymCoefficients {
  double psi_c;
  double phi_c;
};

// Stationary expectations with C = X + c.
struct MomentSet {
  double e_inv_c;  // E[1/C]
  double e_x_c;    // E[X/C]
  double e_x2_c;   // E[X^2/C]
  double e_x_c2;   // E[X/C^2]
  double e_x2_c2;  // E[X^2/C^2]
  double e_x3_c2;  // E[X^3/C^2]
};

// A matrix evaluated two ways plus their largest relative entrywise gap.
struct MatrixForms {
  Mat2 moment_form;
  Mat2 closed_form;
  double discrepancy;
};

// ALA = phi_c^-2 [[sigma11, sigma12], [sigma12, sigma22]].
struct SigmaEntries {
  double sigma11;
  double sigma12;
  double sigma22;
  Mat2 ala;      // phi_c^-2 * sigma, from the closed forms
  Mat2 product;  // A * L * A multiplied out from the moment forms
  double product_discrepancy;
};

struct SingleParamVariances {
  double var_b_wlse;  // 4 E[X^3/C^2] / E[X^2/C]^2
  double var_a_wlse;  // 4 E[X/C^2] / E[1/C]^2
  double var_b_mle;   // 4 / E[X]
  std::optional<double> var_a_mle;  // 4 / E[1/X], only for a > 2
};

struct AsymCovariance {
  AsymCoefficients coefficients;
  MomentSet moments;
  MatrixForms a_forms;
  MatrixForms l_forms;
  SigmaEntries sigma;
  Mat2 A;
  Mat2 L;
  Mat2 ALA;
  Mat4 Lambda;
  std::optional<Mat2> sigma_inv_limit;
};

// psi_c = (-bc/2)^(a/2) e^(-bc/2) Gamma(1 - a/2, -bc/2), phi_c = psi_c (1 - a/(bc)) - 1.
AsymCoefficients psi(const HestonParams& params, const WeightConfig& config);

// Moments obtained from E[1/C] = psi_c / c and E[X/C] = 1 - psi_c by the
// integration-by-parts relations between neighbouring moments.
MomentSet moments(const HestonParams& params, const WeightConfig& config);

// The same six moments written out explicitly as polynomials in psi_c.
MomentSet moments_closed_form(const HestonParams& params, const WeightConfig& config);

// A = G^-1 with G = [[E 1/C, E X/C], [E X/C, E X^2/C]] (moment form), against
// phi_c^-1 [[c(psi_c - 1) - a/b, psi_c - 1], [psi_c - 1, psi_c / c]] (closed form).
// Throws SingularGram when phi_c <= 1e-14.
MatrixForms matrix_A(const MomentSet& m, const HestonParams& params, const WeightConfig& config);

// L = [[E X/C^2, E X^2/C^2], [E X^2/C^2, E X^3/C^2]] against its psi_c closed form.
MatrixForms matrix_L(const MomentSet& m, const HestonParams& params, const WeightConfig& config);

SigmaEntries sigma_entries(const HestonParams& params, const WeightConfig& config);

// Joint covariance [[ALA, rho ALA], [rho ALA, ALA]] for (a, b, alpha, beta).
Mat4 lambda(const HestonParams& params, const WeightConfig& config);

// Sigma = [[-b/(a-2), 1], [1, -a/b]]; requires a > 2.
Mat2 mle_sigma(const HestonParams& params);
// Sigma^-1, the c -> 0 limit of ALA. Throws AsymptoticsError(Domain) for a <= 2.
Mat2 mle_covariance_limit(const HestonParams& params);

SingleParamVariances single_param_variances(const HestonParams& params,
                                            const WeightConfig& config);

// Everything above in one pass. Throws ConsistencyMismatch when the two
// routes for A or L disagree by more than 1e-9.
AsymCovariance asymptotic_covariance(const HestonParams& params, const WeightConfig& config);

}  // namespace hestonwlse
