#pragma once

namespace hestonwlse {

// Upper incomplete gamma function Gamma(alpha, y) for real alpha and y > 0.
//
// For alpha > 0 this is the integral of exp(-t) t^(alpha-1) over [y, inf),
// evaluated by the Legendre continued fraction when y >= alpha + 1 and as
// Gamma(alpha) minus the lower series otherwise. Orders alpha <= 0 are
// reached from a base order in (0, 1] by k = ceil(-alpha) downward steps of
//   Gamma(s, y) = (Gamma(s + 1, y) - y^s e^-y) / s.
// Non-positive integer orders start from Gamma(0, y) = E1(y) instead.
// Each downward step loses at most about log10(max(1, y / |s|)) digits.
//
// Throws std::domain_error for y <= 0 or non-finite arguments.
double upper_incomplete_gamma(double alpha, double y);

// Exponential integral E1(y) = Gamma(0, y), y > 0.
double exponential_integral_e1(double y);

struct RecurrenceResiduals {
  double r1;  // Gamma(a+1,y) - y^a e^-y - a Gamma(a,y)
  double r2;  // Gamma(a+2,y) - y^a e^-y (y+a+1) - a(a+1) Gamma(a,y)
};

RecurrenceResiduals check_recurrences(double alpha, double y);

// Standard normal CDF.
double std_normal_cdf(double z);

}  // namespace hestonwlse
