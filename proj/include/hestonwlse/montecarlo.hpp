#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hestonwlse/model.hpp"
#include "hestonwlse/sde_sim.hpp"

namespace hestonwlse {

// Batch controls. Path i is simulated from streams (sim.seed, i), so the
// results do not depend on `threads`.
struct McConfig {
  SimConfig sim;
  std::size_t n_paths = 500;
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t histogram_bins = 40;
};

struct CoordStats {
  std::string coord;
  double truth = 0.0;
  std::size_t n_success = 0;
  std::size_t n_failed = 0;
  double mean = 0.0;
  double var = 0.0;
  double var_se = 0.0;
  double median_abs_err = 0.0;
  // Predicted variance of the estimate at this horizon, 4 Lambda_kk / T.
  double asym_var = 0.0;
  // Distance of sqrt(T / (4 Lambda_kk)) (estimate - truth) to N(0, 1).
  double ks_stat = 0.0;
  double ks_pvalue = 0.0;
  bool ks_pass = false;
};

// One horizon (consistency, CLT, MLE comparison) or one c (sweep).
struct McRecord {
  double key = 0.0;
  std::uint64_t seed = 0;
  std::vector<CoordStats> coords;
};

struct NormalizedSample {
  std::size_t path_index;
  std::string coord;
  double value;
};

struct Histogram {
  std::string coord;
  double lo;
  double hi;
  std::vector<std::size_t> counts;
};

struct RunningEstimate {
  double t;
  double a_hat;
  double b_hat;
  double alpha_hat;
  double beta_hat;
};

// One-sided check that var(lhs) >= var(rhs) is not contradicted at 5%.
struct VarianceComparison {
  std::string name;
  double var_lhs;
  double var_rhs;
  double diff;  // var_lhs - var_rhs
  double se;
  double z;
  bool pass;
};

struct PathFailure {
  std::size_t path_index;
  std::string arm;
  std::string error;
};

struct McReport {
  std::string kind;
  HestonParams params;
  double c = 0.0;
  SimConfig sim;
  std::size_t n_paths = 0;
  std::vector<McRecord> records;
  std::vector<NormalizedSample> samples;
  std::vector<Histogram> histograms;
  std::vector<RunningEstimate> highlighted_path;
  std::vector<VarianceComparison> comparisons;
  std::map<std::string, double> summary;
  std::vector<PathFailure> failures;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// WLSE at each horizon of every path; aggregates plus running estimates
// along path 0. Horizons must be strictly increasing.
McReport run_consistency(const HestonParams& params, double c, const std::vector<double>& horizons,
                         const McConfig& config, const ProgressFn& progress = {});

// Normalized errors at t = sim.t_end, KS against N(0,1), histograms and the
// empirical correlation of the (a, alpha) and (b, beta) errors.
McReport run_clt(const HestonParams& params, double c, const McConfig& config,
                 const ProgressFn& progress = {});

// WLSE variance for each c over a common set of paths.
McReport run_c_sweep(const HestonParams& params, const std::vector<double>& c_values,
                     const McConfig& config, const ProgressFn& progress = {});

// Single-parameter MLE and WLSE arms plus the joint estimators on the same paths.
McReport run_mle_vs_wlse(const HestonParams& params, double c, const McConfig& config,
                         const ProgressFn& progress = {});

std::string report_to_json(const McReport& report);
// `horizon_or_c,coord,mean,var,var_se,ks_stat`
void write_summary_csv(std::ostream& out, const McReport& report);
// `path_index,coord,value`
void write_samples_csv(std::ostream& out, const McReport& report);

}  // namespace hestonwlse
