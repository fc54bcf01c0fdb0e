#pragma once

#include <cstdint>
#include <optional>

#include "hestonwlse/model.hpp"

namespace hestonwlse {

struct SimConfig {
  double dt = 0.01;
  double t_end = 70.0;
  std::uint64_t seed = 1;
  // QE switching threshold on s^2 / m^2.
  double psi_crit = 1.5;
  // Initial variance; the stationary mean -a/b when unset.
  std::optional<double> x0;
  double y0 = 0.0;
  // Draw x0 from the stationary Gamma law instead (overrides x0).
  bool stationary_init = false;

  bool operator==(const SimConfig&) const = default;
};

SimConfig validate(const SimConfig& config);

// Exact conditional mean and variance of X_{t+dt} given X_t = x.
struct CirStepMoments {
  double m;
  double s2;
  double psi;  // s2 / m^2
};

CirStepMoments cir_step_moments(double x, const HestonParams& params, double dt);

// Random inputs of one QE step. Only `normal` is read in the quadratic branch
// and only `uniform` in the exponential branch.
struct QeDraws {
  double normal;
  double uniform;
};

// One quadratic-exponential step of the variance process; never negative and
// returns exact zeros from the exponential branch with probability p.
double qe_step(double x, const HestonParams& params, double dt, double psi_crit,
               const QeDraws& draws);

// Simulates (X, Y) on [0, t_end]. `path_index` selects the independent
// streams derived from config.seed, so a batch of paths is reproducible
// regardless of the order in which they are generated.
PathGrid simulate(const HestonParams& params, const SimConfig& config,
                  std::uint64_t path_index = 0);

// A draw from Gamma(a/2, rate -b/2).
double sample_stationary_init(const HestonParams& params, std::uint64_t seed,
                              std::uint64_t stream = 0);

}  // namespace hestonwlse
