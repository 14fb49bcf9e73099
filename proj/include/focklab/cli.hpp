#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "focklab/funcmodel.hpp"

namespace focklab::cli {

/// Everything a run depends on. serialize() and parse_config() round-trip,
/// and every artifact header embeds serialize() of the config that made it.
struct RunConfig {
  std::string command = "norm";  // norm | profile | verify | sweep | limit
  std::string fn = "const:1";
  FockParams params;
  std::string method = "gh";  // gh | radial | mc
  int nodes = 32;
  int radial_nodes = 32;
  int angular_nodes = 32;
  std::uint64_t samples = 200'000;
  std::uint64_t seed = 1;
  std::string variant = "sharp-ball";
  double grid_ratio = 0.9;
  int grid_count = 60;
  std::string suite = "all";
  std::vector<double> p_list{0.5, 1.0, 2.0, 4.0};
  std::vector<double> alpha_list{0.5, 1.0, 2.0};
  std::vector<double> p_ladder{2, 4, 8, 16, 32, 64};
  std::uint64_t lemma_draws = 100;
  std::string format = "csv";  // csv | json
  std::string out;             // empty: stdout (verify: no report directory)
  std::string plot;            // profile only: two-column t,g file

  bool operator==(const RunConfig&) const = default;
};

/// Config keys in serialization order.
const std::vector<std::string>& config_keys();

/// Defaults, with the seed taken from FOCKLAB_SEED when set.
RunConfig default_config();

/// Sets one key from its textual value. Throws Error(InvalidInput) on an
/// unknown key or malformed value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// key=value lines; blank lines and '#' comments are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = RunConfig{});
RunConfig load_config_file(const std::string& path, RunConfig base = RunConfig{});

/// One key=value line per key, in config_keys() order.
std::string serialize(const RunConfig& config);

/// Checks enumerations and ranges; throws Error(InvalidInput).
void validate(const RunConfig& config);

/// File name safe form of a check name.
std::string sanitize_filename(std::string_view name);

/// Executes the run. Artifacts are assembled in memory and written by one
/// writer at the end; stdout receives artifacts without an output path.
/// Returns 0 iff the run succeeded and every executed check passed.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace focklab::cli
