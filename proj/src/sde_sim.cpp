#include "hestonwlse/sde_sim.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hestonwlse/rng.hpp"

namespace hestonwlse {

namespace {

// Stream ids above this offset are reserved for initial-state draws.
constexpr std::uint64_t kInitStreamOffset = std::uint64_t{1} << 62;

}  // namespace

SimConfig validate(const SimConfig& config) {
  std::ostringstream os;
  if (!(config.dt > 0.0) || !std::isfinite(config.dt) || !(config.t_end > 0.0) ||
      !std::isfinite(config.t_end) || !(config.dt <= config.t_end)) {
    os << "SimConfig: require 0 < dt <= t_end, got dt=" << config.dt
       << " t_end=" << config.t_end;
    throw std::invalid_argument(os.str());
  }
  if (!(config.psi_crit >= 1.0 && config.psi_crit <= 2.0)) {
    os << "SimConfig: psi_crit must lie in [1, 2], got " << config.psi_crit;
    throw std::invalid_argument(os.str());
  }
  if (config.x0 && (!(*config.x0 >= 0.0) || !std::isfinite(*config.x0))) {
    os << "SimConfig: x0 must be >= 0, got " << *config.x0;
    throw std::invalid_argument(os.str());
  }
  if (!std::isfinite(config.y0)) throw std::invalid_argument("SimConfig: y0 must be finite");
  return config;
}

CirStepMoments cir_step_moments(double x, const HestonParams& params, double dt) {
  const double kappa = -params.b;
  const double theta = -params.a / params.b;
  const double e = std::exp(-kappa * dt);
  const double one_minus_e = -std::expm1(-kappa * dt);
  constexpr double sigma2 = 4.0;
  const double m = theta + (x - theta) * e;
  const double s2 = x * sigma2 * e * one_minus_e / kappa +
                    theta * sigma2 * one_minus_e * one_minus_e / (2.0 * kappa);
  return {m, s2, s2 / (m * m)};
}

double qe_step(double x, const HestonParams& params, double dt, double psi_crit,
               const QeDraws& draws) {
  const auto [m, s2, psi] = cir_step_moments(x, params, dt);
  if (psi <= psi_crit) {
    const double inv = 2.0 / psi;
    const double b2 = inv - 1.0 + std::sqrt(inv) * std::sqrt(inv - 1.0);
    const double scale = m / (1.0 + b2);
    const double root = std::sqrt(b2) + draws.normal;
    return scale * root * root;
  }
  const double p = (psi - 1.0) / (psi + 1.0);
  if (draws.uniform <= p) return 0.0;
  const double beta = (1.0 - p) / m;
  return std::log((1.0 - p) / (1.0 - draws.uniform)) / beta;
}

double sample_stationary_init(const HestonParams& params, std::uint64_t seed,
                              std::uint64_t stream) {
  const auto law = StationaryLaw::from(params);
  CounterRng rng(seed, kInitStreamOffset + stream);
  std::gamma_distribution<double> gamma(law.shape, 1.0 / law.rate);
  double draw = gamma(rng);
  while (!(draw > 0.0)) draw = gamma(rng);
  return draw;
}

PathGrid simulate(const HestonParams& params, const SimConfig& config, std::uint64_t path_index) {
  validate(params);
  validate(config);
  const std::size_t n = grid_steps(config.dt, config.t_end);
  const double dt = config.dt;
  const double a = params.a, b = params.b;
  const double rho = params.rho;
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  double x0 = config.x0.value_or(stationary_mean(params));
  if (config.stationary_init) x0 = sample_stationary_init(params, config.seed, path_index);

  CounterRng vol_rng(config.seed, volatility_stream(path_index));
  CounterRng price_rng(config.seed, price_stream(path_index));
  std::normal_distribution<double> vol_normal;
  std::normal_distribution<double> price_normal;

  std::vector<double> xs(n + 1);
  std::vector<double> ys(n + 1);
  xs[0] = x0;
  ys[0] = config.y0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const auto mom = cir_step_moments(x, params, dt);
    QeDraws draws{0.0, 0.5};
    if (mom.psi <= config.psi_crit) {
      draws.normal = vol_normal(vol_rng);
    } else {
      draws.uniform = vol_rng.uniform();
    }
    const double x_next = qe_step(x, params, dt, config.psi_crit, draws);

    // Trapezoidal approximation of the integral of X over the step; the B
    // increment is recovered from the X dynamics as X+ - X - a dt - b I.
    const double integral = 0.5 * dt * (x + x_next);
    const double b_part = x_next - x - a * dt - b * integral;
    const double z = price_normal(price_rng);
    ys[i + 1] = ys[i] + params.alpha * dt + params.beta * integral + rho * b_part +
                2.0 * rho_perp * std::sqrt(integral) * z;
    xs[i + 1] = x_next;
  }
  return PathGrid(config.dt, config.t_end, std::move(xs), std::move(ys));
}

}  // namespace hestonwlse
