#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hestonwlse/asymptotics.hpp"
#include "hestonwlse/model.hpp"
#include "hestonwlse/sde_sim.hpp"

namespace hestonwlse::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // I/O and anything unexpected
  kUsage = 2,
  kValidation = 3,
  kSimulation = 4,
  kEstimation = 5,
};

struct RunConfig {
  std::string command;
  HestonParams params;
  WeightConfig weight;
  SimConfig sim;
  std::size_t path_index = 0;
  std::size_t n_paths = 500;
  unsigned threads = 0;
  std::size_t bins = 40;
  std::vector<double> horizons{10.0, 30.0, 70.0};
  std::vector<double> c_values{1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::string input;
  std::string out;      // output file (simulate, estimate, asymptotics, mle-limit)
  std::string out_dir;  // output directory (experiments)
  std::string format;   // csv | json; empty picks the command default
  bool mle = false;
  bool quiet = false;
  bool dump_config = false;

  bool operator==(const RunConfig&) const = default;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for --help; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags override values read from --config FILE (flat key=value lines named
// after the long flags).
RunConfig parse_args(int argc, const char* const* argv);

// Inverse of --config for cfg.command.
std::string write_config(const RunConfig& cfg);

// Throws std::invalid_argument (or ParamError).
void validate(const RunConfig& cfg);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// parse_args + validate + run with exit-code mapping.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hestonwlse::cli
