#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "hestonwlse/estimators.hpp"
#include "hestonwlse/montecarlo.hpp"
#include "hestonwlse/path_io.hpp"
#include "json.hpp"

namespace hestonwlse::cli {

namespace {

using nlohmann::json;

// Flat key=value files: every top-level key is routed to the subcommand that
// was selected on the command line.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(const CLI::App* root) : root_(root) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto subs = root_->get_subcommands();
    if (subs.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents = {subs.front()->get_name()};
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

enum Group : unsigned {
  kModel = 1u << 0,
  kWeight = 1u << 1,
  kSim = 1u << 2,
  kHorizon = 1u << 3,  // --t-end
  kMc = 1u << 4,
  kOutFile = 1u << 5,
  kFormat = 1u << 6,
};

struct CommandSpec {
  const char* name;
  const char* help;
  unsigned groups;
};

constexpr CommandSpec kCommands[] = {
    {"simulate", "Simulate one (X, Y) path with the QE scheme", kModel | kSim | kHorizon | kOutFile | kFormat},
    {"estimate", "WLSE (or MLE) of (a, b, alpha, beta) from a stored path", kOutFile},
    {"asymptotics", "Closed-form asymptotic covariance of the WLSE", kModel | kWeight | kOutFile},
    {"mle-limit", "Asymptotic covariance of the MLE (a > 2)", kModel | kOutFile},
    {"mc-consistency", "WLSE along increasing horizons over many paths", kModel | kWeight | kSim | kMc | kFormat},
    {"mc-clt", "Normalized WLSE errors at t-end with KS tests", kModel | kWeight | kSim | kHorizon | kMc | kFormat},
    {"c-sweep", "WLSE variance across c on common paths", kModel | kSim | kHorizon | kMc | kFormat},
    {"mle-vs-wlse", "Single-parameter MLE against WLSE on the same paths",
     kModel | kWeight | kSim | kHorizon | kMc | kFormat},
};

const CommandSpec& spec_for(const std::string& name) {
  for (const auto& s : kCommands) {
    if (name == s.name) return s;
  }
  throw UsageError("unknown command '" + name + "'");
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') q += '\\';
    q += ch;
  }
  return q + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + "]";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json mat(const Mat2& m) { return json::array({{number(m(0, 0)), number(m(0, 1))}, {number(m(1, 0)), number(m(1, 1))}}); }

json mat(const Mat4& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json params_json(const HestonParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"alpha", p.alpha}, {"beta", p.beta}, {"rho", p.rho}};
}

std::string resolved_format(const RunConfig& cfg) {
  if (!cfg.format.empty()) return cfg.format;
  if (cfg.command == "simulate") {
    return std::filesystem::path(cfg.out).extension() == ".json" ? "json" : "csv";
  }
  return "json";
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out, std::ostream& log) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + cfg.out + " for writing");
  f << text;
  if (!f) throw std::ios_base::failure("write failed: " + cfg.out);
  if (!cfg.quiet) log << cfg.command << ": wrote " << cfg.out << "\n";
}

void write_file(const std::filesystem::path& p, const std::string& text, bool quiet, const std::string& who,
                std::ostream& log) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + p.string() + " for writing");
  f << text;
  if (!f) throw std::ios_base::failure("write failed: " + p.string());
  if (!quiet) log << who << ": wrote " << p.string() << "\n";
}

int do_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  std::optional<PathGrid> path;
  try {
    path = simulate(cfg.params, cfg.sim, cfg.path_index);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    log << "simulate: SimulationError: " << e.what() << "\n";
    return kSimulation;
  }
  std::string text;
  if (resolved_format(cfg) == "json") {
    text = path_to_json(*path) + "\n";
  } else {
    std::ostringstream os;
    write_path_csv(os, *path);
    text = os.str();
  }
  emit(cfg, text, out, log);
  return kOk;
}

json integrals_json(const IntegralSet& s) {
  return {{"time_w", s.time_w}, {"time_xw", s.time_xw}, {"time_x2w", s.time_x2w}, {"dx_w", s.dx_w},
          {"dx_xw", s.dx_xw},   {"dy_w", s.dy_w},       {"dy_xw", s.dy_xw}};
}

int do_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  std::optional<PathGrid> path;
  try {
    path = load_path(cfg.input);
  } catch (const std::exception& e) {
    log << "estimate: invalid input: " << e.what() << "\n";
    return kValidation;
  }
  QuadEstimate e;
  try {
    e = cfg.mle ? mle(*path) : wlse(*path, cfg.weight.c);
  } catch (const EstimationError& err) {
    log << "estimate: " << err.what() << "\n";
    return kEstimation;
  }
  json j;
  j["method"] = cfg.mle ? "mle" : "wlse";
  j["c"] = cfg.mle ? json(nullptr) : json(cfg.weight.c);
  j["dt"] = path->dt();
  j["t_end"] = e.t_end;
  j["n_steps"] = path->steps();
  j["a"] = e.a_hat;
  j["b"] = e.b_hat;
  j["alpha"] = e.alpha_hat;
  j["beta"] = e.beta_hat;
  j["gram"] = mat(e.gram);
  j["u"] = {e.u[0], e.u[1]};
  j["v"] = {e.v[0], e.v[1]};
  j["integrals"] = integrals_json(e.integrals);
  emit(cfg, j.dump(2) + "\n", out, log);
  return kOk;
}

int do_asymptotics(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto cov = asymptotic_covariance(cfg.params, cfg.weight);
  const auto single = single_param_variances(cfg.params, cfg.weight);
  const auto& m = cov.moments;
  json j;
  j["params"] = params_json(cfg.params);
  j["c"] = cfg.weight.c;
  j["psi_c"] = cov.coefficients.psi_c;
  j["phi_c"] = cov.coefficients.phi_c;
  j["moments"] = {{"e_inv_c", m.e_inv_c}, {"e_x_c", m.e_x_c},     {"e_x2_c", m.e_x2_c},
                  {"e_x_c2", m.e_x_c2},   {"e_x2_c2", m.e_x2_c2}, {"e_x3_c2", m.e_x3_c2}};
  j["A"] = mat(cov.A);
  j["L"] = mat(cov.L);
  j["sigma"] = {{"sigma11", cov.sigma.sigma11}, {"sigma12", cov.sigma.sigma12}, {"sigma22", cov.sigma.sigma22}};
  j["ALA"] = mat(cov.ALA);
  j["Lambda"] = mat(cov.Lambda);
  j["discrepancy"] = {{"A", cov.a_forms.discrepancy},
                      {"L", cov.l_forms.discrepancy},
                      {"ALA", cov.sigma.product_discrepancy}};
  j["single_param"] = {{"var_b_wlse", single.var_b_wlse},
                       {"var_a_wlse", single.var_a_wlse},
                       {"var_b_mle", single.var_b_mle},
                       {"var_a_mle", single.var_a_mle ? json(*single.var_a_mle) : json(nullptr)}};
  j["sigma_inv_limit"] = cov.sigma_inv_limit ? mat(*cov.sigma_inv_limit) : json(nullptr);
  emit(cfg, j.dump(2) + "\n", out, log);
  return kOk;
}

int do_mle_limit(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  json j;
  j["params"] = params_json(cfg.params);
  j["sigma"] = mat(mle_sigma(cfg.params));
  j["sigma_inv"] = mat(mle_covariance_limit(cfg.params));
  emit(cfg, j.dump(2) + "\n", out, log);
  return kOk;
}

int do_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  McConfig mc;
  mc.sim = cfg.sim;
  mc.n_paths = cfg.n_paths;
  mc.threads = cfg.threads;
  mc.histogram_bins = cfg.bins;

  std::size_t next_report = 0;
  ProgressFn progress;
  if (!cfg.quiet) {
    progress = [&](std::size_t done, std::size_t total) {
      const std::size_t tenth = done * 10 / total;
      if (tenth >= next_report || done == total) {
        log << cfg.command << ": " << done << "/" << total << " paths\n";
        next_report = tenth + 1;
      }
    };
  }

  McReport report;
  try {
    if (cfg.command == "mc-consistency") {
      report = run_consistency(cfg.params, cfg.weight.c, cfg.horizons, mc, progress);
    } else if (cfg.command == "mc-clt") {
      report = run_clt(cfg.params, cfg.weight.c, mc, progress);
    } else if (cfg.command == "c-sweep") {
      report = run_c_sweep(cfg.params, cfg.c_values, mc, progress);
    } else {
      report = run_mle_vs_wlse(cfg.params, cfg.weight.c, mc, progress);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const EstimationError& e) {
    log << cfg.command << ": " << e.what() << "\n";
    return kEstimation;
  } catch (const AsymptoticsError&) {
    throw;
  } catch (const std::exception& e) {
    log << cfg.command << ": SimulationError: " << e.what() << "\n";
    return kSimulation;
  }

  if (!cfg.quiet && !report.failures.empty()) {
    log << cfg.command << ": " << report.failures.size() << " per-path failures recorded\n";
  }

  const bool as_json = resolved_format(cfg) == "json";
  if (cfg.out_dir.empty()) {
    if (as_json) {
      out << report_to_json(report) << "\n";
    } else {
      write_summary_csv(out, report);
    }
    return kOk;
  }
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  if (as_json) {
    write_file(dir / "report.json", report_to_json(report) + "\n", cfg.quiet, cfg.command, log);
  } else {
    std::ostringstream summary, samples;
    write_summary_csv(summary, report);
    write_samples_csv(samples, report);
    write_file(dir / "summary.csv", summary.str(), cfg.quiet, cfg.command, log);
    write_file(dir / "samples.csv", samples.str(), cfg.quiet, cfg.command, log);
  }
  return kOk;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  double x0 = 0.0;
  std::map<std::string, CLI::Option*> x0_opts;

  CLI::App app("Weighted least squares drift estimation for the Heston model", "hestonwlse");
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Read flat key=value settings named after the long flags");
  app.config_formatter(std::make_shared<FlatConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  for (const auto& spec : kCommands) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->fallthrough();
    const unsigned g = spec.groups;
    if (g & kModel) {
      sub->add_option("--a", cfg.params.a, "Variance drift intercept (a > 0)")->capture_default_str();
      sub->add_option("--b", cfg.params.b, "Variance mean reversion (b < 0)")->capture_default_str();
      sub->add_option("--alpha", cfg.params.alpha, "Log-price drift intercept")->capture_default_str();
      sub->add_option("--beta", cfg.params.beta, "Log-price drift slope")->capture_default_str();
      sub->add_option("--rho", cfg.params.rho, "Brownian correlation in (-1, 1)")->capture_default_str();
    }
    if (g & kWeight) sub->add_option("--c", cfg.weight.c, "Weight offset c > 0")->capture_default_str();
    if (g & kSim) {
      if (g & kHorizon) sub->add_option("--t-end", cfg.sim.t_end, "Horizon T")->capture_default_str();
      sub->add_option("--dt", cfg.sim.dt, "Time step")->capture_default_str();
      sub->add_option("--seed", cfg.sim.seed, "Master seed")->capture_default_str();
      sub->add_option("--psi-crit", cfg.sim.psi_crit, "QE switching threshold in [1, 2]")->capture_default_str();
      x0_opts[spec.name] = sub->add_option("--x0", x0, "Initial variance (default: stationary mean)");
      sub->add_option("--y0", cfg.sim.y0, "Initial log-price")->capture_default_str();
      sub->add_flag("--stationary-init", cfg.sim.stationary_init, "Draw X_0 from the stationary law");
    }
    if (g & kMc) {
      sub->add_option("--n-paths", cfg.n_paths, "Number of paths")->capture_default_str();
      sub->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
      sub->add_option("--bins", cfg.bins, "Histogram bins")->capture_default_str();
      sub->add_option("--out-dir", cfg.out_dir, "Write report files here instead of stdout");
    }
    if (g & kOutFile) sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    if (g & kFormat) {
      sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }
    sub->add_flag("--quiet", cfg.quiet, "No progress on stderr");
    sub->add_flag("--dump-config", cfg.dump_config, "Print the effective configuration and exit");

    const std::string name = spec.name;
    if (name == "simulate") {
      sub->add_option("--path-index", cfg.path_index, "Path (stream) index")->capture_default_str();
    } else if (name == "estimate") {
      sub->add_option("--input", cfg.input, "Path file (.csv or .json)")->required();
      auto* c = sub->add_option("--c", cfg.weight.c, "Weight offset c > 0")->capture_default_str();
      sub->add_flag("--mle", cfg.mle, "Maximum likelihood instead of WLSE")->excludes(c);
    } else if (name == "mc-consistency") {
      sub->add_option("--horizons", cfg.horizons, "Increasing horizons")->delimiter(',')->capture_default_str();
    } else if (name == "c-sweep") {
      sub->add_option("--c-values", cfg.c_values, "Weight offsets to compare")->delimiter(',')->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested(os.str());
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested(os.str());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (auto it = x0_opts.find(cfg.command); it != x0_opts.end() && it->second->count() > 0) cfg.sim.x0 = x0;
  return cfg;
}

std::string write_config(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  const unsigned g = spec_for(c).groups;
  std::ostringstream os;
  os << "# hestonwlse " << c << "\n";
  if (g & kModel) {
    os << "a=" << fmt(cfg.params.a) << "\nb=" << fmt(cfg.params.b) << "\nalpha=" << fmt(cfg.params.alpha)
       << "\nbeta=" << fmt(cfg.params.beta) << "\nrho=" << fmt(cfg.params.rho) << "\n";
  }
  if ((g & kWeight) || (c == "estimate" && !cfg.mle)) os << "c=" << fmt(cfg.weight.c) << "\n";
  if (g & kSim) {
    if (g & kHorizon) os << "t-end=" << fmt(cfg.sim.t_end) << "\n";
    os << "dt=" << fmt(cfg.sim.dt) << "\nseed=" << cfg.sim.seed << "\npsi-crit=" << fmt(cfg.sim.psi_crit) << "\n";
    if (cfg.sim.x0) os << "x0=" << fmt(*cfg.sim.x0) << "\n";
    os << "y0=" << fmt(cfg.sim.y0) << "\nstationary-init=" << (cfg.sim.stationary_init ? "true" : "false")
       << "\n";
  }
  if (g & kMc) {
    os << "n-paths=" << cfg.n_paths << "\nthreads=" << cfg.threads << "\nbins=" << cfg.bins << "\n";
    if (!cfg.out_dir.empty()) os << "out-dir=" << quoted(cfg.out_dir) << "\n";
  }
  if ((g & kOutFile) && !cfg.out.empty()) os << "out=" << quoted(cfg.out) << "\n";
  if ((g & kFormat) && !cfg.format.empty()) os << "format=" << cfg.format << "\n";
  if (c == "simulate") os << "path-index=" << cfg.path_index << "\n";
  if (c == "estimate") {
    os << "input=" << quoted(cfg.input) << "\n";
    if (cfg.mle) os << "mle=true\n";
  }
  if (c == "mc-consistency") os << "horizons=" << list(cfg.horizons) << "\n";
  if (c == "c-sweep") os << "c-values=" << list(cfg.c_values) << "\n";
  if (cfg.quiet) os << "quiet=true\n";
  return os.str();
}

void validate(const RunConfig& cfg) {
  const unsigned g = spec_for(cfg.command).groups;
  if (g & kModel) hestonwlse::validate(cfg.params);
  if ((g & kWeight) || (cfg.command == "estimate" && !cfg.mle)) hestonwlse::validate(cfg.weight);
  if (g & kSim) {
    SimConfig sim = cfg.sim;
    if (cfg.command == "mc-consistency" && !cfg.horizons.empty()) sim.t_end = cfg.horizons.back();
    hestonwlse::validate(sim);
  }
  if (g & kMc) {
    if (cfg.n_paths == 0) throw std::invalid_argument("n-paths must be positive");
    if (cfg.bins == 0) throw std::invalid_argument("bins must be positive");
  }
  if (cfg.command == "mc-consistency") {
    if (cfg.horizons.empty()) throw std::invalid_argument("horizons must not be empty");
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
      if (!(cfg.horizons[i] > 0.0) || (i > 0 && !(cfg.horizons[i] > cfg.horizons[i - 1]))) {
        throw std::invalid_argument("horizons must be positive and strictly increasing");
      }
    }
  }
  if (cfg.command == "c-sweep") {
    if (cfg.c_values.empty()) throw std::invalid_argument("c-values must not be empty");
    for (double c : cfg.c_values) hestonwlse::validate(WeightConfig{c});
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.command == "simulate") return do_simulate(cfg, out, log);
  if (cfg.command == "estimate") return do_estimate(cfg, out, log);
  if (cfg.command == "asymptotics") return do_asymptotics(cfg, out, log);
  if (cfg.command == "mle-limit") return do_mle_limit(cfg, out, log);
  return do_experiment(cfg, out, log);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }
  try {
    validate(cfg);
    if (cfg.dump_config) {
      out << write_config(cfg);
      return kOk;
    }
    return run(cfg, out, err);
  } catch (const ParamError& e) {
    err << cfg.command << ": invalid parameters: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << cfg.command << ": invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const AsymptoticsError& e) {
    err << cfg.command << ": " << e.what() << "\n";
    return e.kind() == AsymptoticsErrorKind::ConsistencyMismatch ? kFailure : kValidation;
  } catch (const EstimationError& e) {
    err << cfg.command << ": " << e.what() << "\n";
    return kEstimation;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace hestonwlse::cli
