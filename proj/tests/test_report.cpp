#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "treespde/config.hpp"
#include "treespde/report.hpp"

using nlohmann::json;
using treespde::FellerAnalyzer;
using treespde::MetricTree;
using treespde::NoiseConfig;

TEST_SUITE("report") {

TEST_CASE("numeric fields survive a text round-trip bit for bit") {
  const double values[] = {0.0,
                           1.0,
                           0.1,
                           -2.5e17,
                           1.0 / 3.0,
                           3.141592653589793,
                           std::sqrt(2.0),
                           1e-300,
                           5e-324,
                           std::numeric_limits<double>::max()};
  for (double x : values) {
    const std::string text = treespde::format_full(x);
    char* end = nullptr;
    const double back = std::strtod(text.c_str(), &end);
    CHECK(*end == '\0');
    CHECK(back == x);
  }
  CHECK(treespde::format_full(1.0) == "1");
  CHECK(treespde::format_full(0.5) == "0.5");
}

TEST_CASE("edge labels are 1-based and semicolon-joined") {
  CHECK(treespde::edges_label({}) == "none");
  CHECK(treespde::edges_label({0, 2}) == "1;3");
  CHECK(treespde::edges_label({3}) == "4");
}

TEST_CASE("sweep and reachability tables print one row per entry") {
  const MetricTree tree = treespde::preset_tree("chain:3");
  const NoiseConfig noise = NoiseConfig::from_noise_free(tree, {1});

  treespde::FellerSweepResult sweep;
  sweep.family = 1;
  sweep.test_mode = 1;
  sweep.epsilons = {0.5, 0.25};
  sweep.estimates = {1.0, 0.75};
  sweep.stderrs = {0.0, 0.125};
  CHECK(treespde::feller_csv(sweep, noise) ==
        "epsilon,estimate,stderr,noisy_edges\n"
        "0.5,1,0,1;3\n"
        "0.25,0.75,0.125,1;3\n");

  treespde::ReachabilityResult reach;
  reach.rows = {{1, 1, 1.0}, {1, 2, 0.5}, {2, 1, 0.0}};
  CHECK(treespde::reachability_csv(reach, noise) ==
        "family,mode,probability,noisy_edges\n"
        "1,1,1,1;3\n"
        "1,2,0.5,1;3\n"
        "2,1,0,1;3\n");
}

TEST_CASE("ergodicity tables interleave labels over the time grid") {
  treespde::ErgodicityResult r;
  r.times = {0.0, 0.5};
  r.labels = {"zero", "sigma1_sum", "gaussian"};
  r.averages = {{{0.0, 0.25}, {1.0, 0.5}, {0.75, 0.375}}};
  r.stderrs = {{{0.0, 0.01}, {0.0, 0.02}, {0.0, 0.03125}}};
  r.mean_gap = {2.0, 1.0};
  CHECK(treespde::ergodicity_csv(r) ==
        "time,init_label,average,stderr\n"
        "0,zero,0,0\n"
        "0.5,zero,0.25,0.01\n"
        "0,sigma1_sum,1,0\n"
        "0.5,sigma1_sum,0.5,0.02\n"
        "0,gaussian,0.75,0\n"
        "0.5,gaussian,0.375,0.03125\n");
  CHECK(treespde::ergodicity_gap_csv(r) ==
        "time,mean_gap\n"
        "0,2\n"
        "0.5,1\n");
}

TEST_CASE("trajectory rows recover integer step ids from times") {
  treespde::Trajectory t;
  t.times = {0.0, 0.25, 0.5};
  t.path = {{1.0, 0.0}, {0.5, -0.25}, {0.25, 0.125}};
  CHECK(treespde::trajectory_csv(t, 2, 0.25) ==
        "step,time,c0,c1\n"
        "0,0,1,0\n"
        "1,0.25,0.5,-0.25\n"
        "2,0.5,0.25,0.125\n");
}

TEST_CASE("spectrum tables carry per-edge coefficients and samples") {
  const MetricTree tree = treespde::preset_tree("chain:3");
  const treespde::SpectralBasis basis = treespde::build_basis(tree, 6);

  const std::string csv = treespde::spectrum_csv(basis);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "mode_index,eigenvalue,family,generator,cos_e1,cos_e2,cos_e3,sin_e1,sin_e2,sin_e3");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("0,0,sigma1,0,", 0) == 0);
  int rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(basis.modes.size()));
  CHECK(csv.find(",sigma2,") != std::string::npos);

  const std::string samples = treespde::spectrum_samples_csv(basis, 3);
  std::istringstream sin_(samples);
  std::getline(sin_, header);
  CHECK(header == "mode_index,edge,x,value");
  rows = 0;
  for (std::string line; std::getline(sin_, line);) ++rows;
  CHECK(rows == static_cast<int>(basis.modes.size()) * 3 * 3);
}

TEST_CASE("analysis document lists structure, verdicts, and the certificate") {
  const MetricTree tree = treespde::preset_tree("example-3.6");
  const treespde::NullDecomposition decomposition = treespde::decompose(tree);
  const treespde::NoiseFreeBound bound = treespde::noise_free_bound(tree);
  const FellerAnalyzer analyzer(tree);

  std::vector<treespde::AnalysisVerdict> verdicts;
  verdicts.push_back({{}, analyzer.decide(NoiseConfig::from_noise_free(tree, {}))});
  verdicts.push_back(
      {{0, 1, 2, 3, 4},
       analyzer.decide(NoiseConfig::from_noise_free(tree, {0, 1, 2, 3, 4}))});
  const treespde::SharpnessCertificate cert = treespde::certify_sharpness(tree);

  const json doc =
      json::parse(treespde::analysis_json(tree, decomposition, bound, analyzer,
                                          verdicts, &cert));
  CHECK(doc["vertices"] == 6);
  CHECK(doc["edges"] == 5);
  CHECK(doc["supp"] == json::array({2, 3, 4}));
  CHECK(doc["core"] == json::array({1}));
  CHECK(doc["conn_edges"] == json::array({4}));
  CHECK(doc["kernel_dimension"] == 2);
  CHECK(doc["bound"] == 3);
  CHECK(doc["matching_bound"] == 3);
  CHECK(doc["assumption_status"] == "verified");
  CHECK_FALSE(doc.contains("assumption_detail"));

  REQUIRE(doc["kernel_basis"].size() == 2);
  for (const json& row : doc["kernel_basis"]) {
    REQUIRE(row.size() == 6);
    for (const json& cell : row) CHECK(cell.is_string());
  }

  REQUIRE(doc["s_trees"].size() == 1);
  CHECK(doc["s_trees"][0]["vertices"] == json::array({1, 2, 3, 4}));
  CHECK(doc["n_trees"] == json::array({json::array({5, 6})}));

  REQUIRE(doc["verdicts"].size() == 2);
  const json& open = doc["verdicts"][0];
  CHECK(open["noise_free_edges"] == json::array());
  CHECK(open["strong_feller"] == "yes");
  CHECK(open["irreducible"] == "yes");
  CHECK_FALSE(open.contains("witness"));
  const json& closed = doc["verdicts"][1];
  CHECK(closed["noise_free_edges"] == json::array({1, 2, 3, 4, 5}));
  CHECK(closed["strong_feller"] == "no");
  CHECK(closed["witness_kind"] == "constant");
  CHECK(closed["witness"] == json::array({"1", "1", "1", "1", "1", "1"}));

  const json& sharp = doc["sharpness"];
  CHECK(sharp["bound"] == 3);
  CHECK(sharp["achieved"] == 3);
  CHECK(sharp["sharp"] == true);
  CHECK(sharp["subsets_checked"] == 32);
  CHECK(sharp["witness_noise_free"].size() == 3);

  // Without a certificate the object is omitted entirely.
  const json bare = json::parse(treespde::analysis_json(tree, decomposition, bound,
                                                        analyzer, verdicts, nullptr));
  CHECK_FALSE(bare.contains("sharpness"));
}

TEST_CASE("run manifests embed the canonical config echo") {
  treespde::RunConfig config = treespde::parse_config_text("graph = chain:4\nseed = 9\n");
  treespde::apply_defaults(config, "feller");
  const MetricTree tree = treespde::load_graph(config.graph);
  const auto echo = treespde::config_echo(config, tree);

  const json doc = json::parse(
      treespde::manifest_json("feller", echo, 18446744073709551615ull, 1.5));
  CHECK(doc["subcommand"] == "feller");
  CHECK(doc["seed"] == 18446744073709551615ull);
  CHECK(doc["versions"]["treespde"] == "1.0.0");
  CHECK(doc["versions"]["schema"] == 1);
  CHECK(doc["wall_time_seconds"] == 1.5);
  CHECK(doc["config"]["graph"] == "chain:4");
  CHECK(doc["config"]["seed"] == "9");
  CHECK(doc["config"]["drift"] == "masked_sine");
  CHECK(doc["config"]["N"] == "64");

  // The embedded map replays to the same echo.
  std::map<std::string, std::string> back;
  for (const auto& [key, value] : doc["config"].items())
    back[key] = value.get<std::string>();
  treespde::RunConfig replay = treespde::config_from_echo(back);
  treespde::apply_defaults(replay, "feller");
  CHECK(treespde::config_echo(replay, tree) == echo);
}

}  // TEST_SUITE
