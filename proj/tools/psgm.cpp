// Command-line front end. Everything goes through the C interface.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psgm/psgm.h"

namespace {

// Values given on the command line, applied on top of the config file.
struct Overrides {
  std::map<std::string, std::string> fields;
  std::vector<std::string> assignments;
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& o) {
  cmd->add_option("--config", config_path, "key=value run configuration file")->check(CLI::ExistingFile);
  struct Flag {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--seed", "seed", "random seed"},
      {"--out", "out", "output directory"},
      {"--max-iter", "max_iterations", "iteration budget"},
      {"--rule", "rule", "constant, diminishing, square_summable, geometric, polyak, scaled_polyak"},
      {"--problem", "problem", "builtin name, synth_rmc, synth_phase, csv, movielens or pgm"},
      {"--alpha", "alpha", "constant step"},
      {"--lambda", "lambda", "step scale for diminishing, square_summable and geometric"},
      {"--beta", "beta", "diminishing offset"},
      {"--r", "r", "diminishing exponent"},
      {"--q", "q", "geometric ratio"},
      {"--sigma", "sigma", "scaled Polyak divisor"},
      {"--f-target", "f_target", "Polyak target value"},
      {"--data", "data", "input data file"},
      {"--rank", "rank", "factorization rank"},
  };
  for (const Flag& f : flags) cmd->add_option(f.flag, o.fields[f.key], f.help);
  cmd->add_option("--set", o.assignments, "any config field as key=value (repeatable)");
}

int report(psgm_status s) {
  std::fprintf(stderr, "error: %s: %s\n", psgm_status_name(s), psgm_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected subgradient methods with certified step sizes"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides overrides;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"solve", "run the solver and write history.csv and summary.txt"},
      {"certify", "estimate paraconvexity and error-bound constants, write report.txt"},
      {"bench", "compare the four step-size strategies, write comparison.csv"},
      {"recover", "matrix recovery pipeline, write recovery.txt"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), config_path, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  psgm_config* cfg = nullptr;
  psgm_status s = config_path.empty() ? psgm_config_create(&cfg) : psgm_config_load(config_path.c_str(), &cfg);
  if (s != PSGM_OK) return report(s);

  for (const auto& [key, value] : overrides.fields) {
    if (value.empty()) continue;
    if ((s = psgm_config_set(cfg, key.c_str(), value.c_str())) != PSGM_OK) {
      psgm_config_free(cfg);
      return report(s);
    }
  }
  for (const std::string& a : overrides.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      psgm_config_free(cfg);
      std::fprintf(stderr, "error: usage: --set expects key=value, got '%s'\n", a.c_str());
      return 2;
    }
    if ((s = psgm_config_set(cfg, a.substr(0, eq).c_str(), a.substr(eq + 1).c_str())) != PSGM_OK) {
      psgm_config_free(cfg);
      return report(s);
    }
  }

  s = psgm_execute(command.c_str(), cfg);
  psgm_config_free(cfg);
  if (s != PSGM_OK) return report(s);
  return 0;
}
