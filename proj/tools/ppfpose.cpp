#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppfpose/errors.hpp"
#include "ppfpose/io.hpp"
#include "ppfpose/sim.hpp"
#include "ppfpose/verify.hpp"

namespace fs = std::filesystem;
using namespace ppfpose;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStrict = 3;
constexpr int kExitSingular = 4;

struct ScenarioArgs {
  std::string scenario = "paper";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  bool noise_free = false;
  bool strict = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--scenario", a.scenario, "named scenario")->capture_default_str();
  cmd->add_option("--config", a.config, "config file (overrides --scenario)");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--dt", a.dt, "measurement / integration step [s]");
  cmd->add_option("--duration", a.duration, "simulated time [s]");
  cmd->add_flag("--noise-free", a.noise_free, "drop measurement noise and sensor biases");
  cmd->add_flag("--strict", a.strict, "abort on the first envelope violation");
}

ScenarioConfig resolve(const ScenarioArgs& a) {
  ScenarioConfig cfg = a.config.empty() ? named_scenario(a.scenario) : load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.dt) cfg.dt = *a.dt;
  if (a.duration) cfg.duration = *a.duration;
  if (a.noise_free) cfg.noise_free = true;
  if (a.strict) cfg.envelope = EnvelopePolicy::kStrict;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
}

int cmd_simulate(const ScenarioArgs& a, const std::string& out_dir) {
  const ScenarioConfig cfg = resolve(a);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  const RunRecord rec = run_scenario(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  write_csv(csv, rec);
  write_file(dir / "run.csv", csv.str());
  std::ostringstream summary;
  write_summary(summary, cfg, rec, wall);
  write_file(dir / "summary.txt", summary.str());
  std::ostringstream plot;
  write_plot_script(plot, "run.csv");
  write_file(dir / "plot.gp", plot.str());

  std::cout << "rows: " << rec.rows.size() << "  envelope violations: "
            << rec.envelope_violations << "  wall: " << wall << " s\n";
  switch (rec.abort) {
    case AbortKind::kNone:
      return kExitOk;
    case AbortKind::kEnvelopeViolation:
      std::cerr << "envelope violation at row " << *rec.abort_row << ": " << rec.abort_reason
                << '\n';
      return kExitStrict;
    case AbortKind::kNearSingular:
      std::cerr << "near-singular attitude error at row " << *rec.abort_row << ": "
                << rec.abort_reason << '\n';
      return kExitSingular;
    case AbortKind::kDiverged:
      std::cerr << "diverged at row " << *rec.abort_row << ": " << rec.abort_reason << '\n';
      return kExitFailure;
  }
  return kExitFailure;
}

int cmd_dump_config(const ScenarioArgs& a, const std::string& out) {
  const std::string text = serialize_config(resolve(a));
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kExitOk;
}

int cmd_verify(std::vector<std::string> suites, std::optional<std::size_t> trials,
               std::uint64_t seed, bool serial) {
  if (suites.empty()) suites = suite_names();
  for (const auto& s : suites) {
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      std::cerr << "unknown suite '" << s << "'\n";
      return kExitConfig;
    }
  }
  bool all = true;
  for (const auto& s : suites) {
    const SuiteResult r = run_suite(s, trials.value_or(default_trials(s)), seed,
                                    serial ? Execution::kSerial : Execution::kParallel);
    all = all && r.passed();
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << "  "
              << (r.trials - r.failures) << "/" << r.trials << " ok  worst/tol "
              << r.worst << "  " << r.seconds << " s\n";
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prescribed-performance pose filter on SE(3): simulation and checks"};
  app.require_subcommand(1);

  ScenarioArgs sim_args;
  std::string out_dir = ".";
  auto* sim = app.add_subcommand("simulate", "run a scenario and write run.csv, summary.txt, plot.gp");
  add_scenario_options(sim, sim_args);
  sim->add_option("--out", out_dir, "output directory")->capture_default_str();

  ScenarioArgs dump_args;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-config", "print the resolved config");
  add_scenario_options(dump, dump_args);
  dump->add_option("--out", dump_out, "write to this file instead of stdout");

  std::vector<std::string> suites;
  std::optional<std::size_t> trials;
  std::uint64_t verify_seed = 1;
  bool serial = false;
  auto* ver = app.add_subcommand("verify", "run the numerical property suites");
  ver->add_option("--suite", suites, "suite name (repeatable)");
  ver->add_option("--trials", trials, "samples per suite");
  ver->add_option("--seed", verify_seed, "random seed")->capture_default_str();
  ver->add_flag("--serial", serial, "use the single-threaded kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_args, out_dir);
    if (*dump) return cmd_dump_config(dump_args, dump_out);
    if (*ver) return cmd_verify(suites, trials, verify_seed, serial);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NearSingular& e) {
    std::cerr << "near-singular: " << e.what() << '\n';
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
