#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace hestonwlse;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "hestonwlse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

cli::RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "hestonwlse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_args(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hestonwlse_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("simulate flags land in the run configuration") {
  const auto cfg = parse({"simulate", "--a", "1", "--b", "-2", "--t-end", "70", "--dt", "0.01", "--seed", "42",
                          "--out", "path.csv"});
  CHECK(cfg.command == "simulate");
  CHECK(cfg.params.a == 1.0);
  CHECK(cfg.params.b == -2.0);
  CHECK(cfg.sim.t_end == 70.0);
  CHECK(cfg.sim.dt == 0.01);
  CHECK(cfg.sim.seed == 42);
  CHECK(cfg.out == "path.csv");
  CHECK_FALSE(cfg.sim.x0.has_value());
  CHECK(parse({"simulate", "--x0", "0.25"}).sim.x0 == 0.25);
}

TEST_CASE("usage errors") {
  CHECK_THROWS_AS(parse({}), cli::UsageError);
  CHECK_THROWS_AS(parse({"simulate", "--bogus", "1"}), cli::UsageError);
  CHECK_THROWS_AS(parse({"estimate"}), cli::UsageError);
  CHECK_THROWS_AS(parse({"estimate", "--input", "p.csv", "--mle", "--c", "1"}), cli::UsageError);
  CHECK_THROWS_AS(parse({"mc-clt", "--format", "xml"}), cli::UsageError);
  // Options that do not belong to the subcommand are rejected.
  CHECK_THROWS_AS(parse({"asymptotics", "--n-paths", "5"}), cli::UsageError);
  CHECK_THROWS_AS(parse({"mc-consistency", "--t-end", "5"}), cli::UsageError);
  CHECK(call({"simulate", "--nope"}).code == cli::kUsage);
}

TEST_CASE("every subcommand has --help") {
  for (const char* sub : {"simulate", "estimate", "asymptotics", "mle-limit", "mc-consistency", "mc-clt",
                          "c-sweep", "mle-vs-wlse"}) {
    CAPTURE(std::string(sub));
    const auto r = call({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage:") != std::string::npos);
  }
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("config files round-trip and flags override them") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"simulate", "--a", "0.7", "--b", "-1.25", "--x0", "0.3", "--seed", "9",
                                 "--out", "my path.json", "--path-index", "4", "--stationary-init"},
        std::vector<std::string>{"estimate", "--input", "p.csv", "--c", "0.125"},
        std::vector<std::string>{"estimate", "--input", "p.csv", "--mle"},
        std::vector<std::string>{"mc-consistency", "--horizons", "5,10,20", "--n-paths", "7", "--out-dir", "d",
                                 "--format", "csv", "--quiet"},
        std::vector<std::string>{"c-sweep", "--c-values", "0.001,0.1,1", "--rho", "0.3"},
        std::vector<std::string>{"mle-vs-wlse", "--a", "3", "--threads", "2", "--dt", "0.005"},
        std::vector<std::string>{"asymptotics", "--a", "2.5", "--c", "1e-8"}}) {
    CAPTURE(args[0]);
    const auto original = parse(args);
    const auto file = scratch(original.command + ".cfg");
    std::ofstream(file) << cli::write_config(original);
    const auto reread = parse({original.command, "--config", file.string()});
    CHECK(reread == original);
    const auto reread_first = parse({"--config", file.string(), original.command});
    CHECK(reread_first == original);
  }

  const auto file = scratch("override.cfg");
  std::ofstream(file) << "a=2\nb=-3\nc=0.5\n";
  const auto cfg = parse({"asymptotics", "--b", "-4", "--config", file.string()});
  CHECK(cfg.params.a == 2.0);
  CHECK(cfg.params.b == -4.0);
  CHECK(cfg.weight.c == 0.5);

  std::ofstream(scratch("unknown.cfg")) << "a=2\nnot-a-flag=1\n";
  CHECK(call({"asymptotics", "--config", scratch("unknown.cfg").string()}).code == cli::kUsage);
}

TEST_CASE("dump-config prints a reusable configuration") {
  const auto r = call({"mc-clt", "--n-paths", "12", "--dump-config"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n-paths=12\n") != std::string::npos);
  const auto file = scratch("dumped.cfg");
  std::ofstream(file) << r.out;
  CHECK(parse({"mc-clt", "--config", file.string()}).n_paths == 12);
}

TEST_CASE("validation errors exit with 3") {
  CHECK(call({"simulate", "--b", "1"}).code == cli::kValidation);
  CHECK(call({"simulate", "--a", "0"}).code == cli::kValidation);
  CHECK(call({"simulate", "--dt", "0"}).code == cli::kValidation);
  CHECK(call({"asymptotics", "--c", "-1"}).code == cli::kValidation);
  CHECK(call({"mc-clt", "--n-paths", "0"}).code == cli::kValidation);
  CHECK(call({"mc-consistency", "--horizons", "5,3"}).code == cli::kValidation);
  CHECK(call({"mle-limit", "--a", "1.5"}).code == cli::kValidation);
  CHECK(call({"estimate", "--input", scratch("missing.csv").string()}).code == cli::kValidation);
}

TEST_CASE("simulate then estimate on defaults") {
  const auto path = scratch("pipeline.csv");
  const auto sim = call({"simulate", "--out", path.string(), "--quiet"});
  REQUIRE(sim.code == 0);
  CHECK(sim.out.empty());
  const auto est = call({"estimate", "--input", path.string()});
  REQUIRE(est.code == 0);
  const auto j = json::parse(est.out);
  CHECK(j["method"] == "wlse");
  CHECK(j["t_end"] == 70.0);
  CHECK(j["gram"][0][1] == j["gram"][1][0]);
  CHECK(j["integrals"].contains("dy_xw"));
  CHECK(std::abs(j["a"].get<double>() - 1.0) < 0.5);

  const auto json_path = scratch("pipeline.json");
  REQUIRE(call({"simulate", "--out", json_path.string(), "--quiet", "--t-end", "5"}).code == 0);
  std::ifstream in(json_path);
  const auto pj = json::parse(in);
  CHECK(pj["x"].size() == 501);
}

TEST_CASE("MLE on a zero-hitting path exits with 5") {
  const auto path = scratch("zero.csv");
  REQUIRE(call({"simulate", "--a", "1", "--b", "-2", "--t-end", "100", "--out", path.string(), "--quiet"}).code == 0);
  const auto r = call({"estimate", "--input", path.string(), "--mle"});
  CHECK(r.code == cli::kEstimation);
  CHECK(r.err.find("ZeroHit") != std::string::npos);
  CHECK(r.err.find("grid index") != std::string::npos);
  CHECK(call({"estimate", "--input", path.string()}).code == 0);
}

TEST_CASE("asymptotics at tiny c agrees with mle-limit") {
  const auto asym = call({"asymptotics", "--a", "3", "--b", "-2", "--c", "1e-8"});
  const auto lim = call({"mle-limit", "--a", "3", "--b", "-2"});
  REQUIRE(asym.code == 0);
  REQUIRE(lim.code == 0);
  const auto ja = json::parse(asym.out), jl = json::parse(lim.out);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(ja["ALA"][i][k].get<double>() - jl["sigma_inv"][i][k].get<double>()) < 1e-3);
    }
  }
  CHECK(ja["Lambda"].size() == 4);
}

TEST_CASE("experiments write their declared outputs") {
  const auto dir = scratch("mc_out");
  std::filesystem::remove_all(dir);
  const auto r = call({"mc-clt", "--n-paths", "20", "--t-end", "5", "--out-dir", dir.string(), "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "samples.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "report.json"));
  CHECK(r.out.empty());
  CHECK(r.err.find("20/20 paths") != std::string::npos);

  const auto q = call({"c-sweep", "--n-paths", "10", "--t-end", "5", "--c-values", "0.1,1", "--quiet"});
  REQUIRE(q.code == 0);
  CHECK(q.err.empty());
  CHECK(json::parse(q.out)["records"].size() == 2);
}

TEST_CASE("experiment output does not depend on --threads") {
  for (const char* sub : {"mc-consistency", "mc-clt", "c-sweep", "mle-vs-wlse"}) {
    CAPTURE(std::string(sub));
    std::vector<std::string> base{sub, "--n-paths", "24", "--quiet", "--seed", "5"};
    if (std::string(sub) == "mc-consistency") {
      base.insert(base.end(), {"--horizons", "2,4"});
    } else {
      base.insert(base.end(), {"--t-end", "4"});
    }
    auto one = base, many = base;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "5"});
    const auto r1 = call(one), r5 = call(many);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r5.out);
  }
}
