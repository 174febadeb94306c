#include "treespde/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "treespde/engine.hpp"
#include "treespde/experiments.hpp"

namespace treespde {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::vector<std::string> split_list(const std::string& value) {
  std::string v = value;
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

long long parse_int(const std::string& value, const std::string& where) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError(where + ": expected an integer, got '" + value + "'");
  return x;
}

std::uint64_t parse_uint64(const std::string& value, const std::string& where) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an unsigned integer, got '" + value + "'");
  }
  if (used != value.size() || value.front() == '-')
    throw ConfigError(where + ": expected an unsigned integer, got '" + value + "'");
  return x;
}

double parse_double(const std::string& value, const std::string& where) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError(where + ": expected a number, got '" + value + "'");
  return x;
}

bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(where + ": expected a boolean, got '" + value + "'");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value,
               const std::string& where) {
  if (key == "graph") {
    c.graph = value;
  } else if (key == "noise_free_edges") {
    c.noise_free_tokens = value == "none" ? std::vector<std::string>{} : split_list(value);
  } else if (key == "z_sets") {
    c.z_set_tokens.clear();
    std::string rest = value;
    for (;;) {
      const std::size_t bar = rest.find('|');
      const std::string part = trim(bar == std::string::npos ? rest : rest.substr(0, bar));
      if (part.empty()) throw ConfigError(where + ": empty z_sets group (use 'none')");
      if (part == "none")
        c.z_set_tokens.emplace_back();
      else if (part == "all")
        c.z_set_tokens.push_back({"all"});
      else
        c.z_set_tokens.push_back(split_list(part));
      if (bar == std::string::npos) break;
      rest = rest.substr(bar + 1);
    }
  } else if (key == "drift") {
    c.drift = value;
  } else if (key == "N") {
    c.basis_size = static_cast<int>(parse_int(value, where));
  } else if (key == "tau") {
    c.tau = parse_double(value, where);
  } else if (key == "T") {
    c.horizon = parse_double(value, where);
  } else if (key == "M_traj") {
    c.trajectories = static_cast<int>(parse_int(value, where));
  } else if (key == "seed") {
    c.seed = parse_uint64(value, where);
  } else if (key == "epsilons") {
    c.epsilons.clear();
    if (value != "none")
      for (const std::string& tok : split_list(value))
        c.epsilons.push_back(parse_double(tok, where));
  } else if (key == "delta") {
    c.delta = parse_double(value, where);
  } else if (key == "quad") {
    c.quad = static_cast<int>(parse_int(value, where));
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "family") {
    c.family = static_cast<int>(parse_int(value, where));
  } else if (key == "test_mode") {
    c.test_mode = static_cast<int>(parse_int(value, where));
  } else if (key == "record_stride") {
    c.record_stride = static_cast<int>(parse_int(value, where));
  } else if (key == "integrator") {
    c.integrator = value;
  } else if (key == "svg") {
    c.svg = parse_bool(value, where);
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_int(value, where));
  } else if (key == "sample_points") {
    c.sample_points = static_cast<int>(parse_int(value, where));
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
  c.given.insert(key);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value,
                        const std::string& where) {
  apply_key(config, key, value, where);
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    apply_key(config, key, value, "line " + std::to_string(lineno) + ", key '" + key + "'");
  }
  return config;
}

RunConfig config_from_echo(const std::map<std::string, std::string>& echo) {
  RunConfig config;
  for (const auto& [key, value] : echo) apply_key(config, key, value, "manifest key '" + key + "'");
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw ConfigError("manifest parse failure in '" + path + "': " + e.what());
    }
    if (!doc.contains("config") || !doc["config"].is_object())
      throw ConfigError("manifest '" + path + "' lacks a config object");
    std::map<std::string, std::string> echo;
    for (const auto& [key, value] : doc["config"].items()) {
      if (!value.is_string())
        throw ConfigError("manifest config value for '" + key + "' must be a string");
      echo[key] = value.get<std::string>();
    }
    return config_from_echo(echo);
  }
  return parse_config_text(text);
}

void apply_defaults(RunConfig& c, const std::string& subcommand) {
  static const std::set<std::string> known = {"analyze",        "spectrum",  "simulate",
                                              "feller",         "irreducibility",
                                              "ergodicity",     "verify"};
  if (!known.count(subcommand)) throw ConfigError("unknown subcommand '" + subcommand + "'");

  if (subcommand == "ergodicity") {
    if (!c.was_given("N")) c.basis_size = 32;
    if (!c.was_given("tau")) c.tau = 0.125;
    if (!c.was_given("T")) c.horizon = 30.0;
    if (!c.was_given("M_traj")) c.trajectories = 1000;
    if (!c.was_given("drift")) c.drift = "scaled_dissipative:2";
  } else if (subcommand == "simulate") {
    if (!c.was_given("drift")) c.drift = "zero";
    if (!c.was_given("M_traj")) c.trajectories = 1;
  } else {
    if (!c.was_given("drift")) c.drift = "masked_sine";
  }
  if (c.epsilons.empty()) c.epsilons = default_epsilon_grid();

  if (c.graph.empty() && subcommand != "verify")
    throw ConfigError("missing required key 'graph'");
  if (c.basis_size < 1) throw ConfigError("N must be at least 1");
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(c.horizon > 0.0)) throw ConfigError("T must be positive");
  if (c.trajectories < 1) throw ConfigError("M_traj must be at least 1");
  if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");
  if (c.quad < 2) throw ConfigError("quad must be at least 2");
  for (double e : c.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
  if (c.family < 0) throw ConfigError("family must be nonnegative");
  if (c.test_mode < 1) throw ConfigError("test_mode must be at least 1");
  if (c.record_stride < 1) throw ConfigError("record_stride must be at least 1");
  if (c.threads < 0) throw ConfigError("threads must be nonnegative");
  if (c.sample_points < 0) throw ConfigError("sample_points must be nonnegative");
  if (c.integrator != "phi1" && c.integrator != "plain")
    throw ConfigError("integrator must be 'phi1' or 'plain'");
  try {
    DriftPreset::parse(c.drift);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("drift: ") + e.what());
  }
}

MetricTree parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int n = -1, m = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n >> m) || !(ls >> std::ws).eof())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected header 'n m'");
    } else {
      int a = 0, b = 0;
      if (!(ls >> a >> b) || !(ls >> std::ws).eof())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected edge 'tail head'");
      edges.emplace_back(a, b);
    }
  }
  if (n < 0) throw ConfigError("empty edge list");
  if (static_cast<int>(edges.size()) != m)
    throw ConfigError("edge list declares " + std::to_string(m) + " edges but has " +
                      std::to_string(edges.size()));
  return MetricTree::build(n, edges);
}

MetricTree load_graph(const std::string& spec) {
  if (spec.rfind("chain:", 0) == 0 || spec.rfind("star:", 0) == 0 ||
      spec == "example-3.6" || spec == "t-prime")
    return preset_tree(spec);
  std::ifstream in(spec);
  if (!in) throw ConfigError("unknown preset or unreadable graph file '" + spec + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_edge_list(buffer.str());
}

namespace {

int find_edge_by_vertices(const MetricTree& tree, int a1, int b1, const std::string& token) {
  const int a = a1 - 1, b = b1 - 1;
  if (a < 0 || b < 0 || a >= tree.vertex_count() || b >= tree.vertex_count())
    throw ConfigError("edge token '" + token + "' names a vertex outside the graph");
  for (int j = 0; j < tree.edge_count(); ++j) {
    const Edge& e = tree.edge(j);
    if ((e.tail == a && e.head == b) || (e.tail == b && e.head == a)) return j;
  }
  throw ConfigError("edge token '" + token + "' names a missing edge");
}

}  // namespace

std::vector<int> resolve_edge_tokens(const MetricTree& tree,
                                     const std::vector<std::string>& tokens) {
  std::vector<int> out;
  for (const std::string& t : tokens) {
    int id = -1;
    if (t.size() == 3 && t[0] == 'e' && std::isdigit(static_cast<unsigned char>(t[1])) &&
        std::isdigit(static_cast<unsigned char>(t[2]))) {
      id = find_edge_by_vertices(tree, t[1] - '0', t[2] - '0', t);
    } else if (t.find('-') != std::string::npos) {
      const std::size_t dash = t.find('-');
      const std::string left = t.substr(0, dash), right = t.substr(dash + 1);
      if (!all_digits(left) || !all_digits(right))
        throw ConfigError("bad edge token '" + t + "'");
      id = find_edge_by_vertices(tree, std::stoi(left), std::stoi(right), t);
    } else if (all_digits(t)) {
      const int v = std::stoi(t);
      if (v < 1 || v > tree.edge_count())
        throw ConfigError("edge id " + t + " outside 1.." +
                          std::to_string(tree.edge_count()));
      id = v - 1;
    } else {
      throw ConfigError("bad edge token '" + t + "'");
    }
    out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw ConfigError("duplicate edge in list");
  return out;
}

std::vector<int> resolve_z_group(const MetricTree& tree,
                                 const std::vector<std::string>& group) {
  if (group.size() == 1 && group[0] == "all") {
    std::vector<int> all(tree.edge_count());
    for (int j = 0; j < tree.edge_count(); ++j) all[j] = j;
    return all;
  }
  return resolve_edge_tokens(tree, group);
}

std::map<std::string, std::string> config_echo(const RunConfig& c, const MetricTree& tree) {
  std::map<std::string, std::string> kv;
  kv["graph"] = c.graph;
  {
    const std::vector<int> ids = resolve_edge_tokens(tree, c.noise_free_tokens);
    std::string s;
    for (int j : ids) s += (s.empty() ? "" : ",") + std::to_string(j + 1);
    kv["noise_free_edges"] = ids.empty() ? "none" : s;
  }
  if (!c.z_set_tokens.empty()) {
    std::string all;
    for (const auto& group : c.z_set_tokens) {
      const std::vector<int> ids = resolve_z_group(tree, group);
      std::string s;
      for (int j : ids) s += (s.empty() ? "" : ",") + std::to_string(j + 1);
      if (ids.empty()) s = "none";
      all += (all.empty() ? "" : " | ") + s;
    }
    kv["z_sets"] = all;
  }
  kv["drift"] = DriftPreset::parse(c.drift).name();
  kv["N"] = std::to_string(c.basis_size);
  kv["tau"] = fmt(c.tau);
  kv["T"] = fmt(c.horizon);
  kv["M_traj"] = std::to_string(c.trajectories);
  kv["seed"] = std::to_string(c.seed);
  {
    std::string s;
    for (double e : c.epsilons) s += (s.empty() ? "" : ",") + fmt(e);
    kv["epsilons"] = c.epsilons.empty() ? "none" : s;
  }
  kv["delta"] = fmt(c.delta);
  kv["quad"] = std::to_string(c.quad);
  kv["output_dir"] = c.output_dir;
  kv["family"] = std::to_string(c.family);
  kv["test_mode"] = std::to_string(c.test_mode);
  kv["record_stride"] = std::to_string(c.record_stride);
  kv["integrator"] = c.integrator;
  kv["svg"] = c.svg ? "true" : "false";
  kv["threads"] = std::to_string(c.threads);
  kv["sample_points"] = std::to_string(c.sample_points);
  return kv;
}

}  // namespace treespde
