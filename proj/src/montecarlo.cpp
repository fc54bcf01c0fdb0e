#include "hestonwlse/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hestonwlse/asymptotics.hpp"
#include "hestonwlse/estimators.hpp"
#include "hestonwlse/stats.hpp"
#include "json.hpp"

namespace hestonwlse {

namespace {

constexpr double kHistLo = -4.0;
constexpr double kHistHi = 4.0;
constexpr double kOneSided5pct = 1.6448536269514722;

// Runs fn(i) for i in [0, n) over a pool of workers. Results must be written
// to slot i so that the reduction afterwards is independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, const ProgressFn& progress) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mutex;
  std::exception_ptr first_error;

  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error) first_error = std::current_exception();
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mutex);
        progress(d, n);
      }
    }
  };

  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// Successful estimates of one coordinate (or estimator arm), in path order.
struct Arm {
  std::string coord;
  double truth = 0.0;
  double asym_var = NAN;  // predicted variance of the estimate
  std::vector<double> values;
  std::vector<std::size_t> paths;
  std::size_t failed = 0;

  void add(std::size_t path, double v) {
    values.push_back(v);
    paths.push_back(path);
  }
};

std::vector<double> normalized(const Arm& arm) {
  std::vector<double> z;
  if (!(arm.asym_var > 0.0) || !std::isfinite(arm.asym_var)) return z;
  const double scale = 1.0 / std::sqrt(arm.asym_var);
  z.reserve(arm.values.size());
  for (double v : arm.values) z.push_back((v - arm.truth) * scale);
  return z;
}

CoordStats summarize(const Arm& arm) {
  CoordStats s;
  s.coord = arm.coord;
  s.truth = arm.truth;
  s.n_success = arm.values.size();
  s.n_failed = arm.failed;
  s.mean = stats::mean(arm.values);
  s.var = stats::variance(arm.values);
  s.var_se = stats::jackknife_variance_se(arm.values);
  std::vector<double> abs_err;
  abs_err.reserve(arm.values.size());
  for (double v : arm.values) abs_err.push_back(std::abs(v - arm.truth));
  s.median_abs_err = stats::median(std::move(abs_err));
  s.asym_var = arm.asym_var;
  const auto z = normalized(arm);
  if (z.empty()) {
    s.ks_stat = NAN;
    s.ks_pvalue = NAN;
    s.ks_pass = false;
  } else {
    s.ks_stat = stats::ks_statistic_normal(z);
    s.ks_pvalue = stats::ks_pvalue(s.ks_stat, z.size());
    s.ks_pass = s.ks_stat < stats::ks_critical_1pct(z.size());
  }
  return s;
}

void append_samples(McReport& report, const Arm& arm) {
  const auto z = normalized(arm);
  for (std::size_t k = 0; k < z.size(); ++k) report.samples.push_back({arm.paths[k], arm.coord, z[k]});
}

void append_histogram(McReport& report, const Arm& arm, std::size_t bins) {
  const auto z = normalized(arm);
  if (z.empty() || bins == 0) return;
  report.histograms.push_back({arm.coord, kHistLo, kHistHi, stats::histogram(z, kHistLo, kHistHi, bins)});
}

// The four joint-estimator arms for one horizon and weight.
std::array<Arm, 4> joint_arms(const HestonParams& p, const Mat2& ala, double horizon) {
  std::array<Arm, 4> arms;
  arms[0].coord = "a";
  arms[1].coord = "b";
  arms[2].coord = "alpha";
  arms[3].coord = "beta";
  arms[0].truth = p.a;
  arms[1].truth = p.b;
  arms[2].truth = p.alpha;
  arms[3].truth = p.beta;
  arms[0].asym_var = arms[2].asym_var = 4.0 * ala(0, 0) / horizon;
  arms[1].asym_var = arms[3].asym_var = 4.0 * ala(1, 1) / horizon;
  return arms;
}

void add_joint(std::array<Arm, 4>& arms, std::size_t path, const QuadEstimate& e) {
  arms[0].add(path, e.a_hat);
  arms[1].add(path, e.b_hat);
  arms[2].add(path, e.alpha_hat);
  arms[3].add(path, e.beta_hat);
}

struct PathOutcome {
  std::optional<QuadEstimate> estimate;
  std::string error;
};

void check_config(const HestonParams& params, const McConfig& config) {
  validate(params);
  validate(config.sim);
  if (config.n_paths == 0) throw std::invalid_argument("n_paths must be positive");
}

McReport make_report(std::string kind, const HestonParams& params, double c,
                     const McConfig& config) {
  McReport r;
  r.kind = std::move(kind);
  r.params = params;
  r.c = c;
  r.sim = config.sim;
  if (!r.sim.x0 && !r.sim.stationary_init) r.sim.x0 = stationary_mean(params);
  r.n_paths = config.n_paths;
  return r;
}

double grid_horizon(const SimConfig& sim) {
  return static_cast<double>(grid_steps(sim.dt, sim.t_end)) * sim.dt;
}

// Estimation messages already start with their kind.
std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

McReport run_consistency(const HestonParams& params, double c, const std::vector<double>& horizons,
                         const McConfig& config, const ProgressFn& progress) {
  check_config(params, config);
  validate(WeightConfig{c});
  if (horizons.empty()) throw std::invalid_argument("horizons must not be empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1]))) {
      throw std::invalid_argument("horizons must be positive and strictly increasing");
    }
  }
  McConfig cfg = config;
  cfg.sim.t_end = horizons.back();
  McReport report = make_report("consistency", params, c, cfg);
  const Mat2 ala = asymptotic_covariance(params, {c}).ALA;
  const std::size_t nh = horizons.size();

  std::vector<std::vector<PathOutcome>> outcomes(cfg.n_paths, std::vector<PathOutcome>(nh));
  parallel_for(
      cfg.n_paths, cfg.threads,
      [&](std::size_t i) {
        std::optional<PathGrid> path;
        try {
          path = simulate(params, cfg.sim, i);
        } catch (const std::exception& e) {
          for (auto& o : outcomes[i]) o.error = std::string("SimulationError: ") + e.what();
          return;
        }
        for (std::size_t h = 0; h < nh; ++h) {
          try {
            outcomes[i][h].estimate = wlse(path->truncated(horizons[h]), c);
          } catch (const std::exception& e) {
            outcomes[i][h].error = describe(e);
          }
        }
      },
      progress);

  for (std::size_t h = 0; h < nh; ++h) {
    auto arms = joint_arms(params, ala, horizons[h]);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      const auto& o = outcomes[i][h];
      if (o.estimate) {
        add_joint(arms, i, *o.estimate);
      } else {
        for (auto& arm : arms) arm.failed++;
        report.failures.push_back({i, "wlse@" + std::to_string(horizons[h]), o.error});
      }
    }
    McRecord rec{horizons[h], cfg.sim.seed, {}};
    for (const auto& arm : arms) rec.coords.push_back(summarize(arm));
    report.records.push_back(std::move(rec));
    if (h + 1 == nh) {
      for (const auto& arm : arms) append_samples(report, arm);
    }
  }

  // Running estimates along path 0 on a grid of about 100 checkpoints.
  const PathGrid highlighted = simulate(params, cfg.sim, 0);
  const double step = std::max(highlighted.dt() * 3.0, horizons.back() / 100.0);
  for (double t = step; t <= horizons.back() + 1e-9 * horizons.back(); t += step) {
    try {
      const auto e = wlse(highlighted.truncated(std::min(t, horizons.back())), c);
      report.highlighted_path.push_back({e.t_end, e.a_hat, e.b_hat, e.alpha_hat, e.beta_hat});
    } catch (const EstimationError&) {
      // early degenerate prefixes are skipped
    }
  }
  return report;
}

McReport run_clt(const HestonParams& params, double c, const McConfig& config,
                 const ProgressFn& progress) {
  check_config(params, config);
  validate(WeightConfig{c});
  McReport report = make_report("clt", params, c, config);
  const Mat2 ala = asymptotic_covariance(params, {c}).ALA;

  std::vector<PathOutcome> outcomes(config.n_paths);
  parallel_for(
      config.n_paths, config.threads,
      [&](std::size_t i) {
        try {
          outcomes[i].estimate = wlse(simulate(params, config.sim, i), c);
        } catch (const std::exception& e) {
          outcomes[i].error = describe(e);
        }
      },
      progress);

  const double horizon = grid_horizon(config.sim);
  auto arms = joint_arms(params, ala, horizon);
  for (std::size_t i = 0; i < config.n_paths; ++i) {
    if (outcomes[i].estimate) {
      add_joint(arms, i, *outcomes[i].estimate);
    } else {
      for (auto& arm : arms) arm.failed++;
      report.failures.push_back({i, "wlse", outcomes[i].error});
    }
  }
  McRecord rec{horizon, config.sim.seed, {}};
  for (const auto& arm : arms) {
    rec.coords.push_back(summarize(arm));
    append_samples(report, arm);
    append_histogram(report, arm, config.histogram_bins);
  }
  report.records.push_back(std::move(rec));

  const auto za = normalized(arms[0]);
  const auto zb = normalized(arms[1]);
  const auto zalpha = normalized(arms[2]);
  const auto zbeta = normalized(arms[3]);
  report.summary["corr_a_alpha"] = stats::correlation(za, zalpha);
  report.summary["corr_b_beta"] = stats::correlation(zb, zbeta);
  report.summary["corr_expected"] = params.rho;
  report.summary["ks_critical_1pct"] = stats::ks_critical_1pct(arms[0].values.size());
  return report;
}

McReport run_c_sweep(const HestonParams& params, const std::vector<double>& c_values,
                     const McConfig& config, const ProgressFn& progress) {
  check_config(params, config);
  if (c_values.empty()) throw std::invalid_argument("c_values must not be empty");
  for (double c : c_values) validate(WeightConfig{c});
  McReport report = make_report("c_sweep", params, NAN, config);
  const std::size_t nc = c_values.size();

  std::vector<std::vector<PathOutcome>> outcomes(config.n_paths, std::vector<PathOutcome>(nc));
  parallel_for(
      config.n_paths, config.threads,
      [&](std::size_t i) {
        std::optional<PathGrid> path;
        try {
          path = simulate(params, config.sim, i);
        } catch (const std::exception& e) {
          for (auto& o : outcomes[i]) o.error = std::string("SimulationError: ") + e.what();
          return;
        }
        for (std::size_t k = 0; k < nc; ++k) {
          try {
            outcomes[i][k].estimate = wlse(*path, c_values[k]);
          } catch (const std::exception& e) {
            outcomes[i][k].error = describe(e);
          }
        }
      },
      progress);

  const double horizon = grid_horizon(config.sim);
  double best_var_a = INFINITY, best_var_b = INFINITY;
  for (std::size_t k = 0; k < nc; ++k) {
    const Mat2 ala = asymptotic_covariance(params, {c_values[k]}).ALA;
    auto arms = joint_arms(params, ala, horizon);
    for (std::size_t i = 0; i < config.n_paths; ++i) {
      const auto& o = outcomes[i][k];
      if (o.estimate) {
        add_joint(arms, i, *o.estimate);
      } else {
        for (auto& arm : arms) arm.failed++;
        report.failures.push_back({i, "wlse@c=" + std::to_string(c_values[k]), o.error});
      }
    }
    McRecord rec{c_values[k], config.sim.seed, {}};
    for (const auto& arm : arms) rec.coords.push_back(summarize(arm));
    if (rec.coords[0].var < best_var_a) {
      best_var_a = rec.coords[0].var;
      report.summary["argmin_c_var_a"] = c_values[k];
    }
    if (rec.coords[1].var < best_var_b) {
      best_var_b = rec.coords[1].var;
      report.summary["argmin_c_var_b"] = c_values[k];
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

McReport run_mle_vs_wlse(const HestonParams& params, double c, const McConfig& config,
                         const ProgressFn& progress) {
  check_config(params, config);
  validate(WeightConfig{c});
  McReport report = make_report("mle_vs_wlse", params, c, config);
  const auto cov = asymptotic_covariance(params, {c});
  const auto single = single_param_variances(params, {c});
  const double horizon = grid_horizon(config.sim);

  enum ArmId { kBMle, kBWlse, kAMle, kAWlse, kJointMleA, kJointMleB, kJointWlseA, kJointWlseB, kArms };
  struct Outcome {
    std::array<std::optional<double>, kArms> value;
    std::array<std::string, kArms> error;
    std::size_t zero_samples = 0;
    std::size_t samples = 0;
  };
  std::vector<Outcome> outcomes(config.n_paths);

  parallel_for(
      config.n_paths, config.threads,
      [&](std::size_t i) {
        auto& o = outcomes[i];
        std::optional<PathGrid> path;
        try {
          path = simulate(params, config.sim, i);
        } catch (const std::exception& e) {
          for (auto& err : o.error) err = std::string("SimulationError: ") + e.what();
          return;
        }
        o.samples = path->size();
        o.zero_samples = static_cast<std::size_t>(
            std::count(path->x().begin(), path->x().end(), 0.0));
        auto attempt = [&](ArmId id, auto&& fn) {
          try {
            o.value[id] = fn();
          } catch (const std::exception& e) {
            o.error[id] = describe(e);
          }
        };
        attempt(kBMle, [&] { return mle_b_known_a(*path, params.a); });
        attempt(kBWlse, [&] { return wlse_b_known_a(*path, c, params.a); });
        attempt(kAMle, [&] { return mle_a_known_b(*path, params.b); });
        attempt(kAWlse, [&] { return wlse_a_known_b(*path, c, params.b); });
        try {
          const auto e = mle(*path);
          o.value[kJointMleA] = e.a_hat;
          o.value[kJointMleB] = e.b_hat;
        } catch (const std::exception& e) {
          o.error[kJointMleA] = o.error[kJointMleB] = describe(e);
        }
        try {
          const auto e = wlse(*path, c);
          o.value[kJointWlseA] = e.a_hat;
          o.value[kJointWlseB] = e.b_hat;
        } catch (const std::exception& e) {
          o.error[kJointWlseA] = o.error[kJointWlseB] = describe(e);
        }
      },
      progress);

  const std::array<const char*, kArms> names = {"b_mle_known_a", "b_wlse_known_a", "a_mle_known_b",
                                                "a_wlse_known_b", "a_mle",         "b_mle",
                                                "a_wlse",        "b_wlse"};
  std::array<Arm, kArms> arms;
  for (int k = 0; k < kArms; ++k) {
    arms[k].coord = names[k];
    const bool is_a = (k == kAMle || k == kAWlse || k == kJointMleA || k == kJointWlseA);
    arms[k].truth = is_a ? params.a : params.b;
  }
  arms[kBMle].asym_var = single.var_b_mle / horizon;
  arms[kBWlse].asym_var = single.var_b_wlse / horizon;
  arms[kAMle].asym_var = single.var_a_mle ? *single.var_a_mle / horizon : NAN;
  arms[kAWlse].asym_var = single.var_a_wlse / horizon;
  arms[kJointWlseA].asym_var = 4.0 * cov.ALA(0, 0) / horizon;
  arms[kJointWlseB].asym_var = 4.0 * cov.ALA(1, 1) / horizon;
  if (cov.sigma_inv_limit) {
    arms[kJointMleA].asym_var = 4.0 * (*cov.sigma_inv_limit)(0, 0) / horizon;
    arms[kJointMleB].asym_var = 4.0 * (*cov.sigma_inv_limit)(1, 1) / horizon;
  } else {
    arms[kJointMleA].asym_var = arms[kJointMleB].asym_var = NAN;
  }

  std::size_t zero_paths = 0, zero_samples = 0, total_samples = 0;
  for (std::size_t i = 0; i < config.n_paths; ++i) {
    const auto& o = outcomes[i];
    if (o.zero_samples > 0) ++zero_paths;
    zero_samples += o.zero_samples;
    total_samples += o.samples;
    for (int k = 0; k < kArms; ++k) {
      if (o.value[k]) {
        arms[k].add(i, *o.value[k]);
      } else {
        arms[k].failed++;
        report.failures.push_back({i, names[k], o.error[k]});
      }
    }
  }

  McRecord rec{horizon, config.sim.seed, {}};
  for (const auto& arm : arms) rec.coords.push_back(summarize(arm));
  report.records.push_back(std::move(rec));

  // Paired comparisons on paths where both arms succeeded.
  auto compare = [&](const char* name, ArmId wlse_arm, ArmId mle_arm) {
    std::vector<double> lhs, rhs;
    for (std::size_t i = 0; i < config.n_paths; ++i) {
      const auto& o = outcomes[i];
      if (o.value[wlse_arm] && o.value[mle_arm]) {
        lhs.push_back(*o.value[wlse_arm]);
        rhs.push_back(*o.value[mle_arm]);
      }
    }
    if (lhs.size() < 3) return;
    VarianceComparison cmp;
    cmp.name = name;
    cmp.var_lhs = stats::variance(lhs);
    cmp.var_rhs = stats::variance(rhs);
    cmp.diff = cmp.var_lhs - cmp.var_rhs;
    cmp.se = stats::jackknife_variance_diff_se(lhs, rhs);
    cmp.z = cmp.se > 0.0 ? cmp.diff / cmp.se : 0.0;
    cmp.pass = cmp.z >= -kOneSided5pct;
    report.comparisons.push_back(cmp);
  };
  compare("var_b_wlse_ge_mle", kBWlse, kBMle);
  compare("var_a_wlse_ge_mle", kAWlse, kAMle);

  const double n = static_cast<double>(config.n_paths);
  report.summary["zero_path_fraction"] = static_cast<double>(zero_paths) / n;
  report.summary["zero_sample_fraction"] =
      total_samples ? static_cast<double>(zero_samples) / static_cast<double>(total_samples) : 0.0;
  report.summary["mle_zero_hit_fraction"] = static_cast<double>(arms[kJointMleA].failed) / n;
  report.summary["wlse_success_fraction"] =
      static_cast<double>(arms[kJointWlseA].values.size()) / n;
  return report;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string report_to_json(const McReport& r) {
  using nlohmann::json;
  json j;
  j["kind"] = r.kind;
  j["params"] = {{"a", r.params.a},
                 {"b", r.params.b},
                 {"alpha", r.params.alpha},
                 {"beta", r.params.beta},
                 {"rho", r.params.rho}};
  j["c"] = number(r.c);
  j["sim"] = {{"dt", r.sim.dt},
              {"t_end", r.sim.t_end},
              {"seed", r.sim.seed},
              {"psi_crit", r.sim.psi_crit},
              {"x0", r.sim.x0 ? json(*r.sim.x0) : json(nullptr)},
              {"y0", r.sim.y0},
              {"stationary_init", r.sim.stationary_init}};
  j["n_paths"] = r.n_paths;
  j["records"] = json::array();
  for (const auto& rec : r.records) {
    json jr;
    jr["key"] = rec.key;
    jr["seed"] = rec.seed;
    jr["coords"] = json::array();
    for (const auto& s : rec.coords) {
      jr["coords"].push_back({{"coord", s.coord},
                              {"truth", number(s.truth)},
                              {"n_success", s.n_success},
                              {"n_failed", s.n_failed},
                              {"mean", number(s.mean)},
                              {"var", number(s.var)},
                              {"var_se", number(s.var_se)},
                              {"median_abs_err", number(s.median_abs_err)},
                              {"asym_var", number(s.asym_var)},
                              {"ks_stat", number(s.ks_stat)},
                              {"ks_pvalue", number(s.ks_pvalue)},
                              {"ks_pass", s.ks_pass}});
    }
    j["records"].push_back(std::move(jr));
  }
  j["histograms"] = json::array();
  for (const auto& h : r.histograms) {
    j["histograms"].push_back({{"coord", h.coord}, {"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}});
  }
  j["highlighted_path"] = json::array();
  for (const auto& p : r.highlighted_path) {
    j["highlighted_path"].push_back(
        {{"t", p.t}, {"a", p.a_hat}, {"b", p.b_hat}, {"alpha", p.alpha_hat}, {"beta", p.beta_hat}});
  }
  j["comparisons"] = json::array();
  for (const auto& cmp : r.comparisons) {
    j["comparisons"].push_back({{"name", cmp.name},
                                {"var_lhs", number(cmp.var_lhs)},
                                {"var_rhs", number(cmp.var_rhs)},
                                {"diff", number(cmp.diff)},
                                {"se", number(cmp.se)},
                                {"z", number(cmp.z)},
                                {"pass", cmp.pass}});
  }
  j["summary"] = json::object();
  for (const auto& [k, v] : r.summary) j["summary"][k] = number(v);
  j["failures"] = json::array();
  for (const auto& f : r.failures) {
    j["failures"].push_back({{"path_index", f.path_index}, {"arm", f.arm}, {"error", f.error}});
  }
  return j.dump(2);
}

void write_summary_csv(std::ostream& out, const McReport& report) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "horizon_or_c,coord,mean,var,var_se,ks_stat\n";
  for (const auto& rec : report.records) {
    for (const auto& s : rec.coords) {
      out << rec.key << ',' << s.coord << ',' << s.mean << ',' << s.var << ',' << s.var_se << ','
          << s.ks_stat << '\n';
    }
  }
  out.precision(old);
}

void write_samples_csv(std::ostream& out, const McReport& report) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "path_index,coord,value\n";
  for (const auto& s : report.samples) out << s.path_index << ',' << s.coord << ',' << s.value << '\n';
  out.precision(old);
}

}  // namespace hestonwlse
