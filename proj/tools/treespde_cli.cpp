#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "treespde/config.hpp"
#include "treespde/engine.hpp"
#include "treespde/experiments.hpp"
#include "treespde/feller.hpp"
#include "treespde/nullspace.hpp"
#include "treespde/report.hpp"
#include "treespde/rng.hpp"
#include "treespde/spectrum.hpp"
#include "treespde/svg.hpp"

namespace ts = treespde;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;
constexpr int kExitDivergence = 3;

struct CliState {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // key, value
  std::vector<std::string> z_groups;
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--config", state.config_path,
                  "key=value config file, or a manifest.json to replay");
  const auto opt = [cmd, &state](const std::string& flag, const std::string& key,
                                 const std::string& help) {
    cmd->add_option_function<std::string>(
        flag,
        [&state, key](const std::string& value) { state.overrides.emplace_back(key, value); },
        help);
  };
  opt("--graph", "graph", "preset (chain:m, star:m, example-3.6, t-prime) or edge-list file");
  opt("--noise-free-edges", "noise_free_edges",
      "noise-free edge set Z: ids, e<a><b>, or <a>-<b> tokens; 'none'");
  opt("--drift", "drift", "zero | masked_sine | scaled_dissipative[:c] | cubic");
  opt("--N", "N", "spectral basis size");
  opt("--tau", "tau", "time step");
  opt("--T", "T", "final time");
  opt("--M-traj", "M_traj", "Monte Carlo trajectories");
  opt("--seed", "seed", "master seed");
  opt("--epsilons", "epsilons", "comma-separated perturbation sizes");
  opt("--delta", "delta", "reachability threshold");
  opt("--quad", "quad", "Gauss-Legendre points per edge for the drift projector");
  opt("--output-dir", "output_dir", "directory for CSV/JSON artifacts");
  opt("--family", "family", "probe family id (0 selects the graph-independent ladder)");
  opt("--test-mode", "test_mode", "1-based probe index inside the family");
  opt("--record-stride", "record_stride", "record every s-th step");
  opt("--integrator", "integrator", "phi1 | plain");
  opt("--threads", "threads", "worker threads (0: hardware)");
  opt("--sample-points", "sample_points", "per-edge samples for *_samples.csv (0: off)");
  cmd->add_flag_callback(
      "--svg", [&state] { state.overrides.emplace_back("svg", "true"); },
      "also write SVG plots of the produced curves");
}

std::vector<std::string> split_group(const std::string& text) {
  std::string v = text;
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

ts::RunConfig make_config(const CliState& state, const std::string& subcommand) {
  ts::RunConfig cfg;
  if (!state.config_path.empty()) cfg = ts::parse_config_file(state.config_path);
  for (const auto& [key, value] : state.overrides)
    ts::apply_config_entry(cfg, key, value, "option --" + key);
  if (!state.z_groups.empty()) {
    cfg.z_set_tokens.clear();
    for (const std::string& group : state.z_groups) {
      if (group == "none")
        cfg.z_set_tokens.emplace_back();
      else if (group == "all")
        cfg.z_set_tokens.push_back({"all"});
      else
        cfg.z_set_tokens.push_back(split_group(group));
    }
    cfg.given.insert("z_sets");
  }
  ts::apply_defaults(cfg, subcommand);
  return cfg;
}

void write_file(const ts::RunConfig& cfg, const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path path = fs::path(cfg.output_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ts::ConfigError("cannot write '" + path.string() + "'");
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const ts::RunConfig& cfg, const ts::MetricTree& tree,
                    const std::string& subcommand, const Timer& timer) {
  write_file(cfg, "manifest.json",
             ts::manifest_json(subcommand, ts::config_echo(cfg, tree), cfg.seed,
                               timer.seconds()));
}

int divergence_exit(long long diverged, long long runs) {
  if (diverged <= 0) return 0;
  std::cerr << "warning: " << diverged << " of " << runs << " runs hit the divergence guard\n";
  return diverged * 100 > runs ? kExitDivergence : 0;
}

ts::IntegratorOptions integrator_options(const ts::RunConfig& cfg, bool record) {
  ts::IntegratorOptions opt;
  opt.tau = cfg.tau;
  opt.t_final = cfg.horizon;
  opt.exponential_phi1 = cfg.integrator == "phi1";
  opt.quad = cfg.quad;
  opt.record_stride = record ? cfg.record_stride : 0;
  return opt;
}

ts::MonteCarloParams mc_params(const ts::RunConfig& cfg) {
  ts::MonteCarloParams mc;
  mc.trajectories = cfg.trajectories;
  mc.seed = cfg.seed;
  mc.threads = cfg.threads;
  return mc;
}

int run_analyze(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::NullDecomposition decomposition = ts::decompose(tree);
  const ts::NoiseFreeBound bound = ts::noise_free_bound(tree);
  const ts::FellerAnalyzer analyzer(tree);

  std::printf("graph: %s (n=%d, m=%d)\n", cfg.graph.c_str(), tree.vertex_count(),
              tree.edge_count());
  std::printf("noise-free bound: %d (matching form: %d)\n", bound.bound, bound.matching_bound);
  std::printf("kernel dimension: %d\n", analyzer.kernel_dimension());
  std::printf("assumption: %s\n",
              analyzer.assumption_verified() ? "verified" : analyzer.assumption_detail().c_str());

  std::vector<ts::AnalysisVerdict> verdicts;
  std::vector<std::vector<std::string>> groups = cfg.z_set_tokens;
  if (groups.empty()) groups.emplace_back();  // single verdict for Z empty
  for (const auto& group : groups) {
    ts::AnalysisVerdict v;
    v.noise_free = ts::resolve_z_group(tree, group);
    v.decision = analyzer.decide(ts::NoiseConfig::from_noise_free(tree, v.noise_free));
    std::printf("Z={%s}: strong_feller=%s irreducible=%s\n",
                ts::edges_label(v.noise_free).c_str(),
                ts::to_string(v.decision.strong_feller).c_str(),
                ts::to_string(v.decision.irreducible).c_str());
    verdicts.push_back(std::move(v));
  }

  ts::SharpnessCertificate cert;
  const bool with_cert = tree.edge_count() <= 20;
  if (with_cert) {
    cert = ts::certify_sharpness(tree);
    std::printf("sharpness: achieved=%d sharp=%s (%lld subsets)\n", cert.achieved,
                cert.sharp ? "yes" : "no", cert.subsets_checked);
  }

  write_file(cfg, "analysis.json",
             ts::analysis_json(tree, decomposition, bound, analyzer, verdicts,
                               with_cert ? &cert : nullptr));
  write_manifest(cfg, tree, "analyze", timer);
  return 0;
}

int run_spectrum(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::SpectralBasis basis = ts::build_basis(tree, cfg.basis_size);
  std::printf("built %d modes, eigenvalues in [%.17g, %.17g]\n", basis.size(),
              basis.eigenvalue(0), basis.eigenvalue(basis.size() - 1));
  write_file(cfg, "spectrum.csv", ts::spectrum_csv(basis));
  if (cfg.sample_points > 0)
    write_file(cfg, "spectrum_samples.csv", ts::spectrum_samples_csv(basis, cfg.sample_points));
  write_manifest(cfg, tree, "spectrum", timer);
  return 0;
}

int run_simulate(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::SpectralBasis basis = ts::build_basis(tree, cfg.basis_size);
  const ts::NoiseConfig noise =
      ts::NoiseConfig::from_noise_free(tree, ts::resolve_edge_tokens(tree, cfg.noise_free_tokens));
  const ts::DriftPreset drift = ts::DriftPreset::parse(cfg.drift);
  const ts::TrajectoryRunner runner(basis, noise, drift, integrator_options(cfg, true));
  const ts::Trajectory trajectory =
      runner.run(std::vector<double>(basis.size(), 0.0), ts::derive_stream(cfg.seed, 0));
  std::printf("ran %d steps to T=%.17g, %s\n", trajectory.steps, trajectory.time,
              trajectory.diverged ? "diverged" : "finished");
  write_file(cfg, "trajectory.csv", ts::trajectory_csv(trajectory, basis.size(), cfg.tau));
  if (cfg.sample_points > 0)
    write_file(cfg, "trajectory_samples.csv",
               ts::trajectory_samples_csv(basis, trajectory, cfg.sample_points));
  write_manifest(cfg, tree, "simulate", timer);
  return trajectory.diverged ? kExitDivergence : 0;
}

int run_feller(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::SpectralBasis basis = ts::build_basis(tree, cfg.basis_size);
  const ts::FamilyCatalog catalog(basis);
  const ts::NoiseConfig noise =
      ts::NoiseConfig::from_noise_free(tree, ts::resolve_edge_tokens(tree, cfg.noise_free_tokens));
  const ts::DriftPreset drift = ts::DriftPreset::parse(cfg.drift);
  const ts::FellerSweepResult result =
      ts::feller_sweep(basis, catalog, noise, drift, cfg.family, cfg.test_mode, cfg.epsilons,
                       integrator_options(cfg, false), mc_params(cfg));
  for (std::size_t i = 0; i < result.epsilons.size(); ++i)
    std::printf("eps=%-12.6g estimate=%.6f stderr=%.6f\n", result.epsilons[i],
                result.estimates[i], result.stderrs[i]);
  write_file(cfg, "feller.csv", ts::feller_csv(result, noise));
  if (cfg.svg) {
    ts::PlotSeries series;
    series.label = "family " + std::to_string(cfg.family) + ", mode " +
                   std::to_string(cfg.test_mode);
    series.x = result.epsilons;
    series.y = result.estimates;
    write_file(cfg, "feller.svg",
               ts::line_plot_svg("sign-correlation vs perturbation", "epsilon",
                                 "|mean sign correlation|", true, {series}));
  }
  write_manifest(cfg, tree, "feller", timer);
  return divergence_exit(result.diverged,
                         1LL * cfg.trajectories * static_cast<long long>(cfg.epsilons.size()));
}

int run_irreducibility(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::SpectralBasis basis = ts::build_basis(tree, cfg.basis_size);
  const ts::FamilyCatalog catalog(basis);
  const ts::NoiseConfig noise =
      ts::NoiseConfig::from_noise_free(tree, ts::resolve_edge_tokens(tree, cfg.noise_free_tokens));
  const ts::DriftPreset drift = ts::DriftPreset::parse(cfg.drift);
  const ts::ReachabilityResult result =
      ts::reachability(basis, catalog, noise, drift, cfg.delta, integrator_options(cfg, false),
                       mc_params(cfg));
  for (const ts::ReachabilityRow& row : result.rows)
    std::printf("family=%d mode=%d probability=%.6f\n", row.family, row.mode, row.probability);
  write_file(cfg, "reachability.csv", ts::reachability_csv(result, noise));
  write_manifest(cfg, tree, "irreducibility", timer);
  return divergence_exit(result.diverged, cfg.trajectories);
}

int run_ergodicity(const ts::RunConfig& cfg) {
  Timer timer;
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const ts::SpectralBasis basis = ts::build_basis(tree, cfg.basis_size);
  const ts::NoiseConfig noise =
      ts::NoiseConfig::from_noise_free(tree, ts::resolve_edge_tokens(tree, cfg.noise_free_tokens));
  const ts::DriftPreset drift = ts::DriftPreset::parse(cfg.drift);
  const ts::ErgodicityResult result = ts::ergodicity_curves(
      basis, noise, drift, cfg.record_stride, integrator_options(cfg, true), mc_params(cfg));
  const std::size_t last = result.times.size() - 1;
  for (std::size_t a = 0; a < result.labels.size(); ++a)
    std::printf("init=%-10s terminal average=%.6f (stderr %.6f)\n", result.labels[a].c_str(),
                result.averages[a][last], result.stderrs[a][last]);
  std::printf("terminal mean common-noise gap=%.6g (initial %.6g)\n", result.mean_gap[last],
              result.initial_gap);
  write_file(cfg, "ergodicity.csv", ts::ergodicity_csv(result));
  write_file(cfg, "ergodicity_gap.csv", ts::ergodicity_gap_csv(result));
  if (cfg.svg) {
    std::vector<ts::PlotSeries> series(3);
    for (std::size_t a = 0; a < 3; ++a) {
      series[a].label = result.labels[a];
      series[a].x = result.times;
      series[a].y = result.averages[a];
    }
    write_file(cfg, "ergodicity.svg",
               ts::line_plot_svg("observable averages", "time", "mean sin||X(t)||", false,
                                 series));
    ts::PlotSeries gap;
    gap.label = "mean gap";
    gap.x = result.times;
    gap.y = result.mean_gap;
    write_file(cfg, "ergodicity_gap.svg",
               ts::line_plot_svg("common-noise contraction", "time", "mean ||gap||", false,
                                 {gap}));
  }
  write_manifest(cfg, tree, "ergodicity", timer);
  return divergence_exit(result.diverged, cfg.trajectories);
}

// ---------------------------------------------------------------------------
// verify: fast named self-checks. Exit 2 when any fails.

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string: pass; else failure detail
};

std::string check_preset_bounds() {
  const struct {
    const char* name;
    int bound;
  } cases[] = {{"chain:4", 3}, {"star:4", 1}, {"example-3.6", 3}, {"t-prime", 3}};
  for (const auto& c : cases) {
    const ts::NoiseFreeBound b = ts::noise_free_bound(ts::preset_tree(c.name));
    if (b.bound != c.bound || b.matching_bound != c.bound)
      return std::string(c.name) + ": got " + std::to_string(b.bound) + "/" +
             std::to_string(b.matching_bound) + ", want " + std::to_string(c.bound);
  }
  return {};
}

std::string check_preset_decompositions() {
  {
    const ts::NullDecomposition d = ts::decompose(ts::preset_tree("example-3.6"));
    if (d.supp != std::vector<int>{1, 2, 3} || d.core != std::vector<int>{0} ||
        d.conn_edges != std::vector<int>{3})
      return "example-3.6 decomposition mismatch";
    ts::RationalMatrix want(2, 6);
    const int rows[2][6] = {{0, 1, 0, -1, 0, 0}, {0, 0, 1, -1, 0, 0}};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 6; ++c) want(r, c) = ts::Rational(rows[r][c]);
    if (!(d.kernel.basis == want)) return "example-3.6 kernel rows mismatch";
  }
  {
    const ts::NullDecomposition d = ts::decompose(ts::preset_tree("t-prime"));
    if (d.supp != std::vector<int>{1, 2, 3, 4, 6, 7} || d.core != std::vector<int>{0, 5})
      return "t-prime decomposition mismatch";
    ts::RationalMatrix want(4, 8);
    const int rows[4][8] = {{0, 1, 0, 0, -1, 0, 0, 1},
                            {0, 0, 1, 0, -1, 0, 0, 1},
                            {0, 0, 0, 1, -1, 0, 0, 1},
                            {0, 0, 0, 0, 0, 0, 1, -1}};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 8; ++c) want(r, c) = ts::Rational(rows[r][c]);
    if (!(d.kernel.basis == want)) return "t-prime kernel rows mismatch";
  }
  return {};
}

std::string check_sharpness() {
  for (const char* name : {"chain:4", "star:4", "example-3.6", "t-prime"}) {
    const ts::SharpnessCertificate cert = ts::certify_sharpness(ts::preset_tree(name));
    if (!cert.sharp)
      return std::string(name) + ": achieved " + std::to_string(cert.achieved) + " != bound " +
             std::to_string(cert.bound);
  }
  return {};
}

std::string match_spectrum(const char* name, const std::vector<double>& want) {
  const ts::AdjacencySpectrum s = ts::adjacency_spectrum(ts::preset_tree(name));
  if (s.eigenvalues.size() != want.size())
    return std::string(name) + ": eigenvalue count " + std::to_string(s.eigenvalues.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    if (std::abs(s.eigenvalues[i] - want[i]) > 1e-9)
      return std::string(name) + ": eigenvalue " + std::to_string(i) + " off by " +
             ts::format_full(std::abs(s.eigenvalues[i] - want[i]));
  return {};
}

std::string check_adjacency_spectra() {
  const double pi = std::numbers::pi;
  std::vector<double> chain;
  for (int k = 4; k >= 0; --k) chain.push_back(std::cos(k * pi / 4));
  if (std::string e = match_spectrum("chain:4", chain); !e.empty()) return e;
  if (std::string e = match_spectrum("star:4", {-1, 0, 0, 0, 1}); !e.empty()) return e;
  const double r = std::sqrt(102.0) / 12.0;
  if (std::string e = match_spectrum("t-prime", {-1, -r, 0, 0, 0, 0, r, 1}); !e.empty()) return e;
  return {};
}

std::string check_mode_residuals() {
  for (const char* name : {"chain:4", "star:4", "example-3.6", "t-prime"}) {
    const ts::MetricTree tree = ts::preset_tree(name);
    const ts::SpectralBasis basis = ts::build_basis(tree, 64);
    for (int k = 0; k < basis.size(); ++k) {
      const ts::ModeResiduals res = ts::mode_residuals(tree, basis.modes[k]);
      if (res.continuity > 1e-9 || res.kirchhoff > 1e-8 || res.norm > 1e-9)
        return std::string(name) + " mode " + std::to_string(k) + ": residuals " +
               ts::format_full(res.continuity) + "/" + ts::format_full(res.kirchhoff) + "/" +
               ts::format_full(res.norm);
    }
    for (int a = 0; a < basis.size(); ++a)
      for (int b = a; b < basis.size(); ++b) {
        const double g = ts::inner_product(basis.modes[a], basis.modes[b]) - (a == b ? 1.0 : 0.0);
        if (std::abs(g) > 1e-8)
          return std::string(name) + " Gram (" + std::to_string(a) + "," + std::to_string(b) +
                 ") off by " + ts::format_full(std::abs(g));
      }
  }
  return {};
}

std::string check_mu1() {
  const double pi = std::numbers::pi;
  const double chain = ts::build_basis(ts::preset_tree("chain:4"), 16).mu1();
  if (std::abs(chain - pi * pi / 16) > 1e-9) return "chain:4 mu1 " + ts::format_full(chain);
  const double star = ts::build_basis(ts::preset_tree("star:4"), 16).mu1();
  if (std::abs(star - pi * pi / 4) > 1e-9) return "star:4 mu1 " + ts::format_full(star);
  return {};
}

std::string check_covariance_factor() {
  const ts::MetricTree tree = ts::preset_tree("t-prime");
  const ts::SpectralBasis basis = ts::build_basis(tree, 24);
  const ts::NoiseConfig noise = ts::NoiseConfig::from_noise_free(tree, {5, 6});
  const ts::NoiseSampler sampler(basis, noise);
  const std::vector<std::vector<double>> sigma = sampler.sigma(0.25);
  const ts::NoiseSampler::Factor factor = sampler.factor(0.25);
  const int n = basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ll = 0.0;
      for (int r = 0; r < factor.rank; ++r) ll += factor.l[i][r] * factor.l[j][r];
      if (std::abs(ll - sigma[i][j]) > 1e-10)
        return "factor reconstruction off by " + ts::format_full(std::abs(ll - sigma[i][j]));
    }
  return {};
}

std::string check_covariance_composition() {
  const ts::MetricTree tree = ts::preset_tree("t-prime");
  const ts::SpectralBasis basis = ts::build_basis(tree, 24);
  const ts::NoiseConfig noise = ts::NoiseConfig::from_noise_free(tree, {0, 3});
  const ts::NoiseSampler sampler(basis, noise);
  const double tau = 0.25;
  const auto half = sampler.sigma(tau), full = sampler.sigma(2 * tau);
  const int n = basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double decay =
          std::exp(-basis.eigenvalue(i) * tau) * std::exp(-basis.eigenvalue(j) * tau);
      const double composed = decay * half[i][j] + half[i][j];
      if (std::abs(composed - full[i][j]) > 1e-12 * std::max(1.0, std::abs(full[i][j])))
        return "composition off by " + ts::format_full(std::abs(composed - full[i][j]));
    }
  return {};
}

std::string check_feller_verdicts() {
  const ts::MetricTree tree = ts::preset_tree("t-prime");
  const ts::FellerAnalyzer analyzer(tree);
  const struct {
    std::vector<int> z;
    ts::Tristate want;
  } cases[] = {{{0, 1, 2, 3, 4, 5, 6}, ts::Tristate::no},
               {{5, 6}, ts::Tristate::no},
               {{0, 5}, ts::Tristate::yes},
               {{0, 3, 5}, ts::Tristate::yes},
               {{}, ts::Tristate::yes}};
  for (const auto& c : cases) {
    const ts::FellerDecision d = analyzer.decide(ts::NoiseConfig::from_noise_free(tree, c.z));
    if (d.strong_feller != c.want)
      return "Z={" + ts::edges_label(c.z) + "}: got " + ts::to_string(d.strong_feller);
  }
  return {};
}

std::string check_determinism() {
  const ts::MetricTree tree = ts::preset_tree("chain:4");
  const ts::SpectralBasis basis = ts::build_basis(tree, 8);
  const ts::FamilyCatalog catalog(basis);
  const ts::NoiseConfig noise = ts::NoiseConfig::from_noise_free(tree, {1});
  const ts::DriftPreset drift = ts::DriftPreset::parse("masked_sine");
  ts::IntegratorOptions opt;
  opt.tau = 0.125;
  opt.t_final = 0.25;
  ts::MonteCarloParams mc;
  mc.trajectories = 16;
  mc.seed = 99;
  mc.threads = 2;
  const auto a = ts::feller_sweep(basis, catalog, noise, drift, 1, 1, {1e-2, 1e-3}, opt, mc);
  mc.threads = 5;
  const auto b = ts::feller_sweep(basis, catalog, noise, drift, 1, 1, {1e-2, 1e-3}, opt, mc);
  if (a.estimates != b.estimates || a.stderrs != b.stderrs)
    return "thread count changed Monte Carlo output";
  return {};
}

std::string check_config_roundtrip() {
  const std::string text =
      "graph = t-prime\nnoise_free_edges = e67, e68\ndrift = scaled_dissipative:2\n"
      "tau = 0.125\nT = 1.5\nseed = 42\nepsilons = [1e-2, 1e-3]\nsvg = true\n";
  ts::RunConfig cfg = ts::parse_config_text(text);
  ts::apply_defaults(cfg, "feller");
  const ts::MetricTree tree = ts::load_graph(cfg.graph);
  const auto echo = ts::config_echo(cfg, tree);
  ts::RunConfig back = ts::config_from_echo(echo);
  ts::apply_defaults(back, "feller");
  if (ts::config_echo(back, tree) != echo) return "echo not a fixed point";
  if (back.tau != cfg.tau || back.seed != cfg.seed || back.epsilons != cfg.epsilons)
    return "values drifted through the echo";
  const auto z = ts::resolve_edge_tokens(tree, back.noise_free_tokens);
  if (z != std::vector<int>{5, 6}) return "edge tokens drifted through the echo";
  return {};
}

std::string check_probe_orthonormality() {
  const ts::SpectralBasis basis = ts::build_basis(ts::preset_tree("t-prime"), 32);
  const ts::FamilyCatalog catalog(basis);
  for (int f = 0; f <= catalog.family_count(); ++f) {
    const auto& probes = catalog.probes(f);
    for (std::size_t a = 0; a < probes.size(); ++a)
      for (std::size_t b = a; b < probes.size(); ++b) {
        double dot = 0.0;
        for (const auto& [ka, va] : probes[a].coeffs)
          for (const auto& [kb, vb] : probes[b].coeffs)
            if (ka == kb) dot += va * vb;
        if (std::abs(dot - (a == b ? 1.0 : 0.0)) > 1e-8)
          return "family " + std::to_string(f) + " probes (" + std::to_string(a) + "," +
                 std::to_string(b) + ") dot " + ts::format_full(dot);
      }
  }
  return {};
}

int run_verify() {
  const std::vector<Check> checks = {
      {"preset-bounds", check_preset_bounds},
      {"preset-decompositions", check_preset_decompositions},
      {"sharpness-exhaustive", check_sharpness},
      {"adjacency-spectra", check_adjacency_spectra},
      {"mode-residuals", check_mode_residuals},
      {"heat-rate-closed-form", check_mu1},
      {"covariance-factor", check_covariance_factor},
      {"covariance-composition", check_covariance_composition},
      {"feller-verdicts", check_feller_verdicts},
      {"monte-carlo-determinism", check_determinism},
      {"config-roundtrip", check_config_roundtrip},
      {"probe-orthonormality", check_probe_orthonormality},
  };
  int failures = 0;
  for (const Check& check : checks) {
    std::string detail;
    try {
      detail = check.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::printf("[ ok ] %s\n", check.name.c_str());
    } else {
      std::printf("[FAIL] %s: %s\n", check.name.c_str(), detail.c_str());
      ++failures;
    }
  }
  std::printf("%d/%zu checks passed\n", int(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic heat equations on metric trees"};
  app.require_subcommand(1);

  CliState state;
  std::vector<std::string> names = {"analyze",        "spectrum",   "simulate", "feller",
                                    "irreducibility", "ergodicity", "verify"};
  std::map<std::string, CLI::App*> commands;
  commands["analyze"] =
      app.add_subcommand("analyze", "kernel decomposition, noise-free bound, Feller verdicts");
  commands["analyze"]->add_option("--z", state.z_groups,
                                  "one noise-free set per use: tokens, 'all', or 'none'");
  commands["spectrum"] = app.add_subcommand("spectrum", "write the orthonormal eigenbasis");
  commands["simulate"] = app.add_subcommand("simulate", "record one trajectory");
  commands["feller"] = app.add_subcommand("feller", "sign-correlation sweep over epsilon");
  commands["irreducibility"] =
      app.add_subcommand("irreducibility", "probe reachability probabilities");
  commands["ergodicity"] =
      app.add_subcommand("ergodicity", "time averages from three initial fields");
  commands["verify"] = app.add_subcommand("verify", "run fast named self-checks");
  for (auto& [name, cmd] : commands) add_common_options(cmd, state);

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    if (sub == "verify") return run_verify();
    const ts::RunConfig cfg = make_config(state, sub);
    if (sub == "analyze") return run_analyze(cfg);
    if (sub == "spectrum") return run_spectrum(cfg);
    if (sub == "simulate") return run_simulate(cfg);
    if (sub == "feller") return run_feller(cfg);
    if (sub == "irreducibility") return run_irreducibility(cfg);
    if (sub == "ergodicity") return run_ergodicity(cfg);
  } catch (const ts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::logic_error& e) {
    std::cerr << "internal verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
