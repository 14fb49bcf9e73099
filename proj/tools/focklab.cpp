// focklab: norms, level-set profiles and inequality checks for
// Gaussian-weighted spaces of log-subharmonic functions.

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "focklab/cli.hpp"
#include "focklab/error.hpp"

namespace {

struct Flag {
  const char* key;
  const char* help;
};

// Config keys settable from the command line; flag names swap '_' for '-'.
const std::vector<Flag> kFlags{
    {"fn", "function spec, e.g. \"coherent:a=1,0;alpha=1\""},
    {"dim", "dimension m of R^m"},
    {"p", "exponent p > 0"},
    {"alpha", "weight parameter alpha > 0"},
    {"method", "integration backend: gh, radial or mc"},
    {"nodes", "Gauss-Hermite nodes per axis"},
    {"radial_nodes", "radial rule size"},
    {"angular_nodes", "angular rule size"},
    {"samples", "Monte Carlo samples (per level for profiles)"},
    {"seed", "RNG seed (default: FOCKLAB_SEED or 1)"},
    {"variant", "isoperimetric constant: sharp-ball or paper-literal"},
    {"grid_ratio", "geometric ratio of the level grid"},
    {"grid_count", "number of levels"},
    {"suite", "verify suite name"},
    {"p_list", "comma-separated exponents"},
    {"alpha_list", "comma-separated weight parameters (sweep)"},
    {"p_ladder", "comma-separated exponents for the limit ladder"},
    {"lemma_draws", "random instances for the lemma suite"},
    {"format", "csv or json"},
    {"out", "output file (verify: report directory)"},
    {"plot", "two-column t,g plot data file (profile)"},
};

std::string flag_name(const char* key) {
  std::string s = std::string("--") + key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"focklab: Gaussian-weighted norm and level-set laboratory"};
  app.set_version_flag("--version", FOCKLAB_VERSION);
  app.require_subcommand(1);

  const std::vector<std::pair<const char*, const char*>> commands{
      {"norm", "compute ||f||_{p,alpha}"},
      {"profile", "level-set profile t -> g(t)"},
      {"verify", "run a verification suite"},
      {"sweep", "contraction table over the (p, alpha) grid"},
      {"limit", "p-ladder, extrapolated limit and sup norm"},
  };

  // values[command][key]; only flags actually given override the config
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_paths[name], "key=value config file");
    for (const auto& flag : kFlags) {
      sub->add_option(flag_name(flag.key), values[name][flag.key], flag.help);
    }
    subs.emplace_back(name, sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      auto config = focklab::cli::default_config();
      if (!config_paths[name].empty()) {
        config = focklab::cli::load_config_file(config_paths[name], config);
      }
      config.command = name;
      for (const auto& flag : kFlags) {
        if (sub->count(flag_name(flag.key)) > 0) {
          focklab::cli::apply_setting(config, flag.key, values[name][flag.key]);
        }
      }
      return focklab::cli::run(config, std::cout, std::cerr);
    }
  } catch (const focklab::Error& e) {
    std::cerr << "focklab: " << focklab::to_string(e.kind()) << " error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
