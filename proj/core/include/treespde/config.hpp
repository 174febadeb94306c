#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "treespde/graph.hpp"

namespace treespde {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parsed key=value configuration. Fields start at their universal defaults;
// `given` records which keys were explicit so per-subcommand defaults only
// fill the rest.
struct RunConfig {
  std::string graph;
  std::vector<std::string> noise_free_tokens;
  std::vector<std::vector<std::string>> z_set_tokens;  // analyze verdict requests
  std::string drift;
  int basis_size = 64;             // N
  double tau = 0.03125;            // 2^-5
  double horizon = 0.5;            // T
  int trajectories = 500;          // M_traj
  std::uint64_t seed = 1;
  std::vector<double> epsilons;    // empty: default grid
  double delta = 1e-6;
  int quad = 128;
  std::string output_dir = ".";
  int family = 1;
  int test_mode = 1;
  int record_stride = 1;
  std::string integrator = "phi1";  // phi1 | plain
  bool svg = false;
  int threads = 0;
  int sample_points = 0;

  std::set<std::string> given;
  bool was_given(const std::string& key) const { return given.count(key) != 0; }
};

// Key=value text, one pair per line, '#' comments, lists comma-separated and
// optionally bracketed. Unknown keys and malformed values throw ConfigError
// with the line number.
RunConfig parse_config_text(const std::string& text);

// Reads a config file; a leading '{' switches to manifest ingestion (the
// "config" object of an emitted manifest).
RunConfig parse_config_file(const std::string& path);

// Re-parses the canonical key map of an emitted manifest.
RunConfig config_from_echo(const std::map<std::string, std::string>& echo);

// Sets one key from its text form, same validation as the file parser;
// `where` prefixes error messages (e.g. "option --tau").
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value,
                        const std::string& where);

// Fills keys the user left out with the subcommand's defaults and checks
// ranges; throws ConfigError on violations.
void apply_defaults(RunConfig& config, const std::string& subcommand);

// Preset name or edge-list file path.
MetricTree load_graph(const std::string& spec);

// Edge-list text: first data line "n m", then m lines "tail head" (1-based);
// '#' comments and blank lines allowed.
MetricTree parse_edge_list(const std::string& text);

// Tokens: 1-based edge index, e<d><d> vertex pair (single digits), or
// <i>-<j> vertex pair. Returns sorted unique 0-based edge ids.
std::vector<int> resolve_edge_tokens(const MetricTree& tree,
                                     const std::vector<std::string>& tokens);

// One z_sets group: "all", "none", or edge tokens.
std::vector<int> resolve_z_group(const MetricTree& tree,
                                 const std::vector<std::string>& group);

// Canonical key map for the manifest; parsing it back yields an equivalent
// config (resolved edge ids, full-precision numbers).
std::map<std::string, std::string> config_echo(const RunConfig& config,
                                               const MetricTree& tree);

}  // namespace treespde
