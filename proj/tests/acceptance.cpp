// Acceptance gate. Each criterion prints one [PASS]/[FAIL] line; detail rows
// record the measured numbers the verdict rests on. Arguments select
// criteria by number (default: all ten). Exit status 0 iff everything passed.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "treespde/config.hpp"
#include "treespde/engine.hpp"
#include "treespde/experiments.hpp"
#include "treespde/feller.hpp"
#include "treespde/graph.hpp"
#include "treespde/nullspace.hpp"
#include "treespde/parallel.hpp"
#include "treespde/rational.hpp"
#include "treespde/report.hpp"
#include "treespde/rng.hpp"
#include "treespde/spectrum.hpp"

using namespace treespde;

namespace {

struct Gate {
  int checks = 0;
  int failed = 0;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failed;
      std::printf("  [check failed] %s\n", what.c_str());
    }
  }
};

std::string fmt(double x) { return format_full(x); }

std::string z_label(const std::vector<int>& z) {
  return "Z=" + edges_label(z);
}

RationalMatrix reduced_span(const std::vector<std::vector<long long>>& rows) {
  RationalMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = Rational(rows[r][c]);
  rref(m);
  return m;
}

bool same_matrix(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (!(a(r, c) == b(r, c))) return false;
  return true;
}

// ---------------------------------------------------------------- criterion 1

Gate criterion_1() {
  Gate g;
  const struct {
    const char* name;
    int want;
  } cases[] = {{"chain:4", 3}, {"star:4", 1}, {"t-prime", 3}, {"example-3.6", 3}};
  for (const auto& c : cases) {
    const NoiseFreeBound b = noise_free_bound(preset_tree(c.name));
    std::printf("  [bound] %s: kernel form %d, matching form %d, expected %d\n", c.name,
                b.bound, b.matching_bound, c.want);
    g.expect(b.bound == c.want, std::string(c.name) + " kernel-form bound");
    g.expect(b.matching_bound == c.want, std::string(c.name) + " matching-form bound");
  }
  return g;
}

// ---------------------------------------------------------------- criterion 2

Gate criterion_2() {
  Gate g;
  for (const char* name : {"chain:4", "star:4", "t-prime", "example-3.6"}) {
    const MetricTree tree = preset_tree(name);
    const SharpnessCertificate cert = certify_sharpness(tree);
    const NoiseFreeBound b = noise_free_bound(tree);
    std::printf("  [sharpness] %s: bound %d, achieved %d, subsets %lld\n", name, cert.bound,
                cert.achieved, cert.subsets_checked);
    g.expect(cert.bound == b.bound && cert.achieved == b.bound && cert.sharp,
             std::string(name) + " certificate");
    g.expect(cert.subsets_checked == (1LL << tree.edge_count()),
             std::string(name) + " exhaustive enumeration");
  }
  SplitMix64 seeds(424242);
  int agreed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(seeds.next() % 10);  // m <= 10
    const MetricTree tree = random_tree(n, seeds.next());
    const SharpnessCertificate cert = certify_sharpness(tree);
    const NoiseFreeBound b = noise_free_bound(tree);
    if (cert.bound == b.bound && cert.achieved == b.bound && cert.sharp) ++agreed;
  }
  std::printf("  [sharpness] random trees in agreement: %d / 200\n", agreed);
  g.expect(agreed == 200, "sharpness on 200 random trees");
  return g;
}

// ---------------------------------------------------------------- criterion 3

Gate criterion_3() {
  Gate g;
  {
    const MetricTree tree = preset_tree("example-3.6");
    const NullDecomposition d = decompose(tree);
    g.expect(d.supp == std::vector<int>{1, 2, 3}, "example-3.6 support vertices");
    g.expect(d.core == std::vector<int>{0}, "example-3.6 core vertices");
    g.expect(d.conn_edges == std::vector<int>{3}, "example-3.6 connector edge");
    RationalMatrix mine = d.kernel.basis;
    rref(mine);
    const RationalMatrix listed =
        reduced_span({{0, 1, -1, 0, 0, 0}, {0, 1, 0, -1, 0, 0}});
    g.expect(same_matrix(mine, listed), "example-3.6 kernel span");
    std::printf("  [decomposition] example-3.6: supp {2,3,4}, core {1}, conn {e15}: %s\n",
                g.failed == 0 ? "reproduced" : "MISMATCH");
  }
  {
    const MetricTree tree = preset_tree("t-prime");
    const NullDecomposition d = decompose(tree);
    const int before = g.failed;
    g.expect(d.supp == std::vector<int>{1, 2, 3, 4, 6, 7}, "t-prime support vertices");
    g.expect(d.core == std::vector<int>{0, 5}, "t-prime core vertices");
    g.expect(d.conn_edges.empty(), "t-prime has no connector edges");
    RationalMatrix mine = d.kernel.basis;
    rref(mine);
    const RationalMatrix listed = reduced_span({{0, 1, 0, 0, -1, 0, 0, 1},
                                                {0, 0, 1, 0, -1, 0, 0, 1},
                                                {0, 0, 0, 1, -1, 0, 0, 1},
                                                {0, 0, 0, 0, 0, 0, 1, -1}});
    g.expect(same_matrix(mine, listed), "t-prime kernel span");
    std::printf("  [decomposition] t-prime: supp {2,3,4,5,7,8}, core {1,6}: %s\n",
                g.failed == before ? "reproduced" : "MISMATCH");
  }
  return g;
}

// ---------------------------------------------------------------- criterion 4

Gate criterion_4() {
  Gate g;
  const double pi = 3.14159265358979323846;
  const double r102 = std::sqrt(102.0) / 12.0;
  const struct {
    const char* name;
    std::vector<double> mus;  // ascending
    double mu1;               // 0: not pinned
  } cases[] = {
      {"chain:4", {-1.0, -std::sqrt(0.5), 0.0, std::sqrt(0.5), 1.0}, pi * pi / 16.0},
      {"star:4", {-1.0, 0.0, 0.0, 0.0, 1.0}, pi * pi / 4.0},
      {"t-prime", {-1.0, -r102, 0.0, 0.0, 0.0, 0.0, r102, 1.0}, 0.0},
  };
  for (const auto& c : cases) {
    const MetricTree tree = preset_tree(c.name);
    const AdjacencySpectrum spectrum = adjacency_spectrum(tree);
    double worst_mu = 0.0;
    for (std::size_t i = 0; i < c.mus.size(); ++i)
      worst_mu = std::max(worst_mu, std::abs(spectrum.eigenvalues[i] - c.mus[i]));
    g.expect(spectrum.eigenvalues.size() == c.mus.size(),
             std::string(c.name) + " adjacency eigenvalue count");
    g.expect(worst_mu <= 1e-9, std::string(c.name) + " adjacency spectrum closed form");

    const SpectralBasis basis = build_basis(tree, 64);
    double continuity = 0.0, kirchhoff = 0.0, norm = 0.0;
    for (const EigenMode& mode : basis.modes) {
      const ModeResiduals r = mode_residuals(tree, mode);
      continuity = std::max(continuity, r.continuity);
      kirchhoff = std::max(kirchhoff, r.kirchhoff);
      norm = std::max(norm, r.norm);
    }
    double gram = 0.0;
    for (int i = 0; i < basis.size(); ++i)
      for (int j = i; j < basis.size(); ++j)
        gram = std::max(gram, std::abs(inner_product(basis.modes[i], basis.modes[j]) -
                                       (i == j ? 1.0 : 0.0)));
    std::printf(
        "  [basis] %s: adjacency dev %s, continuity %s, kirchhoff %s, norm %s, gram %s\n",
        c.name, fmt(worst_mu).c_str(), fmt(continuity).c_str(), fmt(kirchhoff).c_str(),
        fmt(norm).c_str(), fmt(gram).c_str());
    g.expect(continuity <= 1e-9, std::string(c.name) + " continuity residual");
    g.expect(kirchhoff <= 1e-8, std::string(c.name) + " flux residual");
    g.expect(norm <= 1e-9, std::string(c.name) + " normalization residual");
    g.expect(gram <= 1e-8, std::string(c.name) + " orthonormality");
    if (c.mu1 > 0.0) {
      std::printf("  [basis] %s: spectral gap %s vs %s\n", c.name, fmt(basis.mu1()).c_str(),
                  fmt(c.mu1).c_str());
      g.expect(std::abs(basis.mu1() - c.mu1) <= 1e-9, std::string(c.name) + " spectral gap");
    }
  }
  return g;
}

// ---------------------------------------------------------------- criterion 5

Gate criterion_5() {
  Gate g;
  const MetricTree tree = preset_tree("chain:4");
  const SpectralBasis basis = build_basis(tree, 16);
  const NoiseConfig noise = NoiseConfig::from_noise_free(tree, {});
  IntegratorOptions opts;  // tau 2^-5, T 0.5
  const TrajectoryRunner runner(basis, noise, DriftPreset::zero(), opts);

  const int n = basis.size();
  std::vector<double> initial(n);
  for (int k = 0; k < n; ++k) initial[k] = 1.0 / (1.0 + k);
  const GaussianLaw law = linear_exact_law(basis, noise, initial, opts.t_final);

  const int traj = 100000;
  const std::uint64_t master = 20250815;
  const int chunks = 64;
  std::vector<std::vector<double>> sum1(chunks, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> sum2(chunks, std::vector<double>(n * n, 0.0));
  std::vector<int> bad(chunks, 0);
  parallel_for(chunks, 0, [&](int c) {
    const int lo = static_cast<int>(static_cast<long long>(traj) * c / chunks);
    const int hi = static_cast<int>(static_cast<long long>(traj) * (c + 1) / chunks);
    std::vector<double>& s1 = sum1[c];
    std::vector<double>& s2 = sum2[c];
    for (int i = lo; i < hi; ++i) {
      const Trajectory t = runner.run(initial, derive_stream(master, i));
      if (t.diverged) {
        ++bad[c];
        continue;
      }
      for (int k = 0; k < n; ++k) {
        s1[k] += t.terminal[k];
        for (int l = k; l < n; ++l) s2[k * n + l] += t.terminal[k] * t.terminal[l];
      }
    }
  });
  int diverged = 0;
  for (int c = 0; c < chunks; ++c) diverged += bad[c];
  g.expect(diverged == 0, "no diverged trajectories");

  std::vector<double> mean(n), second(n * n);
  for (int k = 0; k < n; ++k) {
    KahanSum acc;
    for (int c = 0; c < chunks; ++c) acc.add(sum1[c][k]);
    mean[k] = acc.value() / traj;
    for (int l = k; l < n; ++l) {
      KahanSum acc2;
      for (int c = 0; c < chunks; ++c) acc2.add(sum2[c][k * n + l]);
      second[k * n + l] = acc2.value() / traj;
    }
  }

  int total = 0, within = 0;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double se = std::sqrt(law.covariance[k][k] / traj);
    const double dev = std::abs(mean[k] - law.mean[k]) / se;
    worst = std::max(worst, dev);
    ++total;
    if (dev <= 3.0) ++within;
  }
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      const double cov = second[k * n + l] - mean[k] * mean[l];
      const double se = std::sqrt(
          (law.covariance[k][k] * law.covariance[l][l] +
           law.covariance[k][l] * law.covariance[k][l]) /
          traj);
      const double dev = std::abs(cov - law.covariance[k][l]) / se;
      worst = std::max(worst, dev);
      ++total;
      if (dev <= 3.0) ++within;
    }
  std::printf("  [moments] %d trajectories, %d of %d entries within 3 SE, worst %.2f SE\n",
              traj, within, total, worst);
  g.expect(total == 152, "entry census (16 means + 136 covariances)");
  g.expect(within * 100 >= total * 95, "at least 95% of entries within 3 SE");
  return g;
}

// ----------------------------------------------------- criteria 6, 7, 9 table

struct ConfigOutcome {
  std::string graph;
  std::vector<int> z;
  std::size_t noisy_count = 0;
  Tristate verdict = Tristate::indeterminate;
  bool y_empty = false;
  std::vector<double> grid;      // all-noise-free configs: full-grid estimates
  double estimate = -1.0;        // readout at eps = 1e-4
  bool witness_probe = false;    // readout taken along the analyzer witness
  std::vector<ReachabilityRow> rows;
  double min_row = 2.0;
  bool zero_row = false;
  double witness_hit = -1.0;     // hitting fraction along the witness; -1: not run
};

ConfigOutcome run_config(const SpectralBasis& basis, const FamilyCatalog& catalog,
                         const FellerAnalyzer& analyzer, const std::string& graph,
                         const std::vector<int>& z, std::uint64_t seed) {
  ConfigOutcome out;
  out.graph = graph;
  out.z = z;
  const NoiseConfig noise = NoiseConfig::from_noise_free(basis.tree, z);
  out.noisy_count = noise.noisy_edges.size();
  const FellerDecision decision = analyzer.decide(noise);
  out.verdict = decision.strong_feller;
  out.y_empty = noise.noisy_edges.empty();

  const DriftPreset drift = DriftPreset::masked_sine();
  IntegratorOptions opts;  // N fixed by the basis; tau 2^-5, T 0.5
  MonteCarloParams mc;
  mc.trajectories = 500;
  mc.seed = seed;

  if (out.y_empty) {
    const FellerSweepResult s = feller_sweep(basis, catalog, noise, drift, 1, 1,
                                             default_epsilon_grid(), opts, mc);
    out.grid = s.estimates;
    out.estimate = s.estimates.back();
  } else if (decision.strong_feller == Tristate::no) {
    std::vector<double> witness(decision.witness.size());
    for (std::size_t v = 0; v < witness.size(); ++v)
      witness[v] = decision.witness[v].to_double();
    const std::vector<ProbeMode> probes = vertex_mode_probes(basis, witness, 0.0);
    const FellerSweepResult s = feller_sweep_probes(basis, probes, probes.front(), noise,
                                                    drift, {1e-4}, opts, mc);
    out.estimate = s.estimates.front();
    out.witness_probe = true;

    // Hitting fraction from the zero field along the same blocked direction.
    const TrajectoryRunner runner(basis, noise, drift, opts);
    const std::vector<double> zero_state(basis.size(), 0.0);
    std::vector<char> hit(mc.trajectories, 0), ok(mc.trajectories, 0);
    parallel_for(mc.trajectories, 0, [&](int i) {
      const Trajectory t = runner.run(zero_state, derive_stream(seed ^ 0x9E3779B9ULL, i));
      if (t.diverged) return;
      ok[i] = 1;
      hit[i] = std::abs(probe_coefficient(t.terminal, probes.front())) > 1e-6 ? 1 : 0;
    });
    int hits = 0, good = 0;
    for (int i = 0; i < mc.trajectories; ++i) {
      good += ok[i];
      hits += hit[i];
    }
    out.witness_hit = good > 0 ? static_cast<double>(hits) / good : 0.0;
  } else {
    const FellerSweepResult s =
        feller_sweep(basis, catalog, noise, drift, 1, 1, {1e-4}, opts, mc);
    out.estimate = s.estimates.front();
  }

  MonteCarloParams mc2 = mc;
  mc2.seed = seed + 1;
  const ReachabilityResult reach =
      reachability(basis, catalog, noise, drift, 1e-6, opts, mc2);
  out.rows = reach.rows;
  for (const ReachabilityRow& row : reach.rows) {
    out.min_row = std::min(out.min_row, row.probability);
    out.zero_row = out.zero_row || row.probability == 0.0;
  }
  return out;
}

const std::vector<ConfigOutcome>& feller_ir_outcomes() {
  static std::vector<ConfigOutcome> cache;
  if (!cache.empty()) return cache;

  std::uint64_t seed = 73000;
  for (const char* name : {"chain:4", "star:4"}) {
    const MetricTree tree = preset_tree(name);
    const SpectralBasis basis = build_basis(tree, 64);
    const FamilyCatalog catalog(basis);
    const FellerAnalyzer analyzer(tree);
    for (unsigned mask = 0; mask < 16; ++mask) {
      std::vector<int> z;
      for (int j = 0; j < 4; ++j)
        if (mask >> j & 1u) z.push_back(j);
      cache.push_back(run_config(basis, catalog, analyzer, name, z, seed));
      seed += 97;
    }
  }
  {
    const MetricTree tree = preset_tree("t-prime");
    const SpectralBasis basis = build_basis(tree, 64);
    const FamilyCatalog catalog(basis);
    const FellerAnalyzer analyzer(tree);
    const std::vector<std::vector<int>> named = {
        {0, 1, 2, 3, 4, 5, 6}, {5, 6}, {0, 5}, {0, 3, 5}, {}};
    for (const std::vector<int>& z : named) {
      cache.push_back(run_config(basis, catalog, analyzer, "t-prime", z, seed));
      seed += 97;
    }
  }

  for (const ConfigOutcome& o : cache)
    std::printf(
        "  [config] %-11s %-14s verdict=%-3s est@1e-4=%-22s min_row=%-8s zero_row=%d%s\n",
        o.graph.c_str(), z_label(o.z).c_str(), to_string(o.verdict).c_str(),
        fmt(o.estimate).c_str(), fmt(o.min_row).c_str(), o.zero_row ? 1 : 0,
        o.witness_hit >= 0.0 ? ("  witness_hit=" + fmt(o.witness_hit)).c_str() : "");
  return cache;
}

const ConfigOutcome* find_outcome(const std::string& graph, const std::vector<int>& z) {
  for (const ConfigOutcome& o : feller_ir_outcomes())
    if (o.graph == graph && o.z == z) return &o;
  return nullptr;
}

Gate criterion_6() {
  Gate g;
  for (const ConfigOutcome& o : feller_ir_outcomes()) {
    const std::string tag = o.graph + " " + z_label(o.z);
    if (o.graph == "chain:4") {
      if (o.noisy_count >= 1) {
        g.expect(o.estimate < 0.3, tag + " readout " + fmt(o.estimate) + " < 0.3");
      } else {
        g.expect(o.grid.size() == default_epsilon_grid().size(), tag + " full grid");
        for (double e : o.grid)
          g.expect(e == 1.0, tag + " noiseless readout " + fmt(e) + " == 1");
      }
    } else if (o.graph == "star:4") {
      if (o.noisy_count <= 2)
        g.expect(o.estimate > 0.7, tag + " readout " + fmt(o.estimate) + " > 0.7");
      else
        g.expect(o.estimate < 0.3, tag + " readout " + fmt(o.estimate) + " < 0.3");
    }
  }
  const ConfigOutcome* red = find_outcome("t-prime", {5, 6});
  const ConfigOutcome* purple = find_outcome("t-prime", {0, 3, 5});
  g.expect(red != nullptr && red->estimate > 0.7,
           "t-prime Z={e67,e68} readout stays above 0.7");
  g.expect(purple != nullptr && purple->estimate < 0.3,
           "t-prime Z={e12,e15,e67} readout falls below 0.3");
  return g;
}

Gate criterion_7() {
  Gate g;
  for (const ConfigOutcome& o : feller_ir_outcomes()) {
    const std::string tag = o.graph + " " + z_label(o.z);
    if (o.verdict == Tristate::yes)
      g.expect(o.min_row >= 0.9, tag + " min probability " + fmt(o.min_row) + " >= 0.9");
    if (o.y_empty)
      for (const ReachabilityRow& row : o.rows)
        g.expect(row.probability == 0.0, tag + " noiseless row exactly zero");
  }
  const ConfigOutcome* red = find_outcome("t-prime", {5, 6});
  g.expect(red != nullptr, "t-prime Z={e67,e68} present");
  if (red != nullptr) {
    int blocked_rows = 0;
    for (const ReachabilityRow& row : red->rows)
      if (row.family == 6) {
        ++blocked_rows;
        g.expect(row.probability == 0.0,
                 "t-prime Z={e67,e68} pendant-difference family row exactly zero");
      }
    g.expect(blocked_rows > 0, "pendant-difference family appears in the table");
  }
  return g;
}

Gate criterion_9() {
  Gate g;
  for (const ConfigOutcome& o : feller_ir_outcomes()) {
    const std::string tag = o.graph + " " + z_label(o.z);
    g.expect(o.verdict != Tristate::indeterminate, tag + " analyzer verdict is definite");

    Tristate mc_smoothing = Tristate::indeterminate;
    if (o.y_empty) {
      bool all_one = !o.grid.empty();
      for (double e : o.grid) all_one = all_one && e == 1.0;
      if (all_one) mc_smoothing = Tristate::no;
    } else if (o.estimate < 0.3) {
      mc_smoothing = Tristate::yes;
    } else if (o.estimate > 0.7) {
      mc_smoothing = Tristate::no;
    }
    g.expect(mc_smoothing == o.verdict,
             tag + " smoothing readout (" + to_string(mc_smoothing) + ") vs analyzer (" +
                 to_string(o.verdict) + ")");

    const bool blocked = o.zero_row || o.witness_hit == 0.0;
    Tristate mc_reach = Tristate::indeterminate;
    if (blocked)
      mc_reach = Tristate::no;
    else if (o.min_row >= 0.9)
      mc_reach = Tristate::yes;
    g.expect(mc_reach == o.verdict, tag + " reachability readout (" + to_string(mc_reach) +
                                        ") vs analyzer (" + to_string(o.verdict) + ")");
  }
  return g;
}

// ---------------------------------------------------------------- criterion 8

Gate criterion_8() {
  Gate g;
  const MetricTree tree = preset_tree("chain:4");
  const SpectralBasis basis = build_basis(tree, 32);
  const NoiseConfig noise = NoiseConfig::from_noise_free(tree, {});
  const DriftPreset drift = DriftPreset::scaled_dissipative(2.0);
  IntegratorOptions opts;
  opts.tau = 0.125;
  opts.t_final = 30.0;
  MonteCarloParams mc;
  mc.trajectories = 1000;
  mc.seed = 1;
  const ErgodicityResult r = ergodicity_curves(basis, noise, drift, 24, opts, mc);
  g.expect(r.diverged == 0, "no diverged trajectories");

  for (std::size_t a = 0; a < 3; ++a)
    std::printf("  [terminal] %-10s average %s, stderr %s\n", r.labels[a].c_str(),
                fmt(r.averages[a].back()).c_str(), fmt(r.stderrs[a].back()).c_str());
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      const double gap = std::abs(r.averages[a].back() - r.averages[b].back());
      const double se = std::sqrt(r.stderrs[a].back() * r.stderrs[a].back() +
                                  r.stderrs[b].back() * r.stderrs[b].back());
      g.expect(gap <= 3.0 * se, r.labels[a] + " vs " + r.labels[b] + ": |" + fmt(gap) +
                                    "| <= 3*" + fmt(se));
    }

  const double rate = basis.mu1() - 0.5;  // drift Lipschitz constant is 1/2
  std::printf("  [envelope] initial gap %s, decay rate %s\n", fmt(r.initial_gap).c_str(),
              fmt(rate).c_str());
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double envelope = 1.05 * r.initial_gap * std::exp(-rate * r.times[i]);
    const bool ok = r.mean_gap[i] <= envelope;
    std::printf("  [envelope] t=%-5s gap %-22s bound %-22s %s\n", fmt(r.times[i]).c_str(),
                fmt(r.mean_gap[i]).c_str(), fmt(envelope).c_str(),
                ok ? "ok" : "VIOLATED");
    g.expect(ok, "gap within envelope at t=" + fmt(r.times[i]));
  }
  return g;
}

// ---------------------------------------------------------------- criterion 10

bool support_independent(const MetricTree& tree, const RationalVector& v) {
  for (const Edge& e : tree.edges())
    if (!v[e.tail].is_zero() && !v[e.head].is_zero()) return false;
  return true;
}

// Max independent set and max matching by leaf-stripping dynamic programs,
// written against the raw edge list as an oracle independent of the library.
void tree_dp(const MetricTree& tree, int& alpha, int& nu) {
  const int n = tree.vertex_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : tree.edges()) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<int> order, parent(n, -1), state(n, 0);
  order.reserve(n);
  std::vector<int> stack = {0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = v;
        stack.push_back(w);
      }
  }
  // independent set: in[v] = 1 + sum out(children); out[v] = sum max(in, out)
  std::vector<int> take(n, 1), skip(n, 0);
  // matching: free[v] = sum best(children); used[v] = match v with one child
  std::vector<int> free_(n, 0), used(n, 0);
  for (int i = n - 1; i >= 0; --i) {
    const int v = order[i];
    int best_used = -1;
    for (int w : adj[v]) {
      if (w == parent[v]) continue;
      take[v] += skip[w];
      skip[v] += std::max(take[w], skip[w]);
      free_[v] += std::max(free_[w], used[w]);
    }
    for (int w : adj[v]) {
      if (w == parent[v]) continue;
      const int candidate =
          free_[v] - std::max(free_[w], used[w]) + free_[w] + 1;
      best_used = std::max(best_used, candidate);
    }
    used[v] = best_used < 0 ? 0 : best_used;
  }
  alpha = std::max(take[0], skip[0]);
  nu = std::max(free_[0], used[0]);
}

bool check_atoms(const MetricTree& tree, const NullDecomposition& d) {
  std::vector<char> in_supp(tree.vertex_count(), 0), in_core(tree.vertex_count(), 0);
  for (int v : d.supp) in_supp[v] = 1;
  for (int v : d.core) in_core[v] = 1;
  std::size_t dim_sum = 0;
  for (const STree& s : d.s_trees)
    for (const std::vector<int>& atom : s.s_atoms) {
      const int ns = static_cast<int>(atom.size());
      std::map<int, int> local;
      for (int i = 0; i < ns; ++i) local[atom[i]] = i;
      std::vector<std::pair<int, int>> internal;
      for (const Edge& e : tree.edges())
        if (local.count(e.tail) && local.count(e.head))
          internal.emplace_back(local[e.tail], local[e.head]);
      RationalMatrix adjacency(ns, ns);
      RationalMatrix incidence(ns, internal.size());
      for (std::size_t j = 0; j < internal.size(); ++j) {
        adjacency(internal[j].first, internal[j].second) = Rational(1);
        adjacency(internal[j].second, internal[j].first) = Rational(1);
        incidence(internal[j].first, j) = Rational(1);
        incidence(internal[j].second, j) = Rational(1);
      }
      const RationalMatrix atom_kernel = nullspace(adjacency);
      int supp_s = 0, core_s = 0;
      for (int v : atom) {
        supp_s += in_supp[v];
        core_s += in_core[v];
      }
      if (static_cast<int>(atom_kernel.rows()) != supp_s - core_s) return false;
      if (rank(incidence.transposed() * atom_kernel.transposed()) != atom_kernel.rows())
        return false;
      dim_sum += atom_kernel.rows();
    }
  return dim_sum == d.kernel.dimension();
}

bool same_decomposition(const NullDecomposition& a, const NullDecomposition& b) {
  if (a.supp != b.supp || a.core != b.core || a.conn_edges != b.conn_edges) return false;
  if (a.n_trees != b.n_trees || a.s_trees.size() != b.s_trees.size()) return false;
  for (std::size_t i = 0; i < a.s_trees.size(); ++i)
    if (a.s_trees[i].vertices != b.s_trees[i].vertices ||
        a.s_trees[i].s_atoms != b.s_trees[i].s_atoms ||
        a.s_trees[i].bond_edges != b.s_trees[i].bond_edges)
      return false;
  return same_matrix(a.kernel.basis, b.kernel.basis);
}

Gate criterion_10() {
  Gate g;
  SplitMix64 seeds(0xFEEDFACE);
  int claim3 = 0, claim2 = 0, partition = 0, incidence_identity = 0, gallai = 0,
      orientation = 0, monotone = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 2 + static_cast<int>(seeds.next() % 13);  // up to 14 vertices
    const MetricTree tree = random_tree(n, seeds.next());
    const NullDecomposition d = decompose(tree);
    const GraphMatrices mats = derive_matrices(tree);

    // independent supports: basis rows and random combinations
    {
      bool ok = true;
      for (std::size_t r = 0; r < d.kernel.basis.rows(); ++r)
        ok = ok && support_independent(tree, d.kernel.basis.row(r));
      for (int combo = 0; combo < 3 && ok; ++combo) {
        RationalVector v(tree.vertex_count(), Rational(0));
        for (std::size_t r = 0; r < d.kernel.basis.rows(); ++r) {
          const Rational c(static_cast<long long>(seeds.next() % 7) - 3);
          for (int w = 0; w < tree.vertex_count(); ++w)
            v[w] += c * d.kernel.basis(r, w);
        }
        ok = ok && support_independent(tree, v);
      }
      claim3 += ok;
    }

    claim2 += check_atoms(tree, d);

    // weak partition of Supp and Core by the atoms, plus the counting identities
    {
      std::vector<int> cover(tree.vertex_count(), 0);
      for (const STree& s : d.s_trees)
        for (const std::vector<int>& atom : s.s_atoms)
          for (int v : atom) ++cover[v];
      std::vector<char> in_sc(tree.vertex_count(), 0);
      for (int v : d.supp) in_sc[v] = 1;
      for (int v : d.core) in_sc[v] = 1;
      bool ok = true;
      for (int v = 0; v < tree.vertex_count(); ++v) ok = ok && cover[v] == (in_sc[v] ? 1 : 0);
      std::size_t remainder = 0;
      for (const std::vector<int>& component : d.n_trees) remainder += component.size();
      const MatchingNumbers numbers = matching_number(tree);
      ok = ok && 2 * static_cast<int>(d.core.size()) ==
                     2 * numbers.nu - static_cast<int>(remainder);
      ok = ok && 2 * static_cast<int>(d.supp.size()) ==
                     2 * numbers.alpha - static_cast<int>(remainder);
      partition += ok;
    }

    // incidence identity M M^T = D + A
    {
      bool ok = true;
      for (int v = 0; v < mats.n && ok; ++v)
        for (int w = 0; w < mats.n && ok; ++w) {
          long long sum = 0;
          for (int j = 0; j < mats.m; ++j) sum += mats.incidence[v][j] * mats.incidence[w][j];
          ok = sum == (v == w ? mats.degree[v] : mats.adjacency[v][w]);
        }
      incidence_identity += ok;
    }

    // independence and matching numbers against an independent dynamic program
    {
      int alpha = 0, nu = 0;
      tree_dp(tree, alpha, nu);
      const MatchingNumbers numbers = matching_number(tree);
      gallai += numbers.nu == nu && numbers.alpha == alpha && alpha + nu == n &&
                matching_number_hopcroft_karp(tree) == nu;
    }

    // reversing one edge changes nothing derived
    {
      const int j = static_cast<int>(seeds.next() % tree.edge_count());
      const MetricTree flipped = tree.with_reversed_edge(j);
      const NoiseFreeBound b1 = noise_free_bound(tree);
      const NoiseFreeBound b2 = noise_free_bound(flipped);
      orientation += b1.bound == b2.bound && b1.matching_bound == b2.matching_bound &&
                     same_decomposition(d, decompose(flipped));
    }

    // verdict flips from no to yes exactly once as noise-free edges disappear
    {
      const FellerAnalyzer analyzer(tree);
      std::vector<int> z(tree.edge_count());
      for (int j = 0; j < tree.edge_count(); ++j) z[j] = j;
      bool ok = true, positive_seen = false, prev_condition = false;
      for (;;) {
        const NoiseConfig config = NoiseConfig::from_noise_free(tree, z);
        const FellerDecision decision = analyzer.decide(config);
        const bool positive = decision.strong_feller != Tristate::no;
        if (positive_seen && !positive) ok = false;
        positive_seen = positive_seen || positive;
        const bool condition = analyzer.kernel_condition(config);
        if (prev_condition && !condition) ok = false;  // monotone in shrinking Z
        prev_condition = condition;
        if (z.empty()) {
          ok = ok && positive;  // every edge noisy always restores smoothing
          break;
        }
        z.erase(z.begin() + static_cast<int>(seeds.next() % z.size()));
      }
      monotone += ok;
    }
  }

  std::printf(
      "  [suites] independent-support %d, atom-rank %d, weak-partition %d, "
      "incidence %d, matching %d, orientation %d, monotone-verdict %d (of %d)\n",
      claim3, claim2, partition, incidence_identity, gallai, orientation, monotone, trials);
  g.expect(claim3 == trials, "independent kernel supports");
  g.expect(claim2 == trials, "atom kernel dimensions and incidence ranks");
  g.expect(partition == trials, "weak partition and counting identities");
  g.expect(incidence_identity == trials, "M M^T = D + A");
  g.expect(gallai == trials, "matching and independence numbers");
  g.expect(orientation == trials, "orientation independence");
  g.expect(monotone == trials, "monotone smoothing verdict");
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  const char* titles[] = {"",
                          "noise-free bounds on the presets",
                          "exhaustive sharpness certificates",
                          "kernel support decomposition ground truth",
                          "closed-form spectra and basis quality",
                          "drift-free terminal law moments",
                          "smoothing sign-readout thresholds",
                          "reachability probabilities",
                          "long-horizon averages and contraction envelope",
                          "analyzer versus Monte Carlo verdicts",
                          "random-tree property suites"};

  int failed_criteria = 0;
  for (int c : wanted) {
    Gate g;
    switch (c) {
      case 1: g = criterion_1(); break;
      case 2: g = criterion_2(); break;
      case 3: g = criterion_3(); break;
      case 4: g = criterion_4(); break;
      case 5: g = criterion_5(); break;
      case 6: g = criterion_6(); break;
      case 7: g = criterion_7(); break;
      case 8: g = criterion_8(); break;
      case 9: g = criterion_9(); break;
      case 10: g = criterion_10(); break;
      default:
        std::printf("[FAIL] criterion %d: unknown criterion number\n", c);
        ++failed_criteria;
        continue;
    }
    const bool pass = g.failed == 0;
    if (!pass) ++failed_criteria;
    std::printf("[%s] criterion %d: %s (%d checks, %d failed)\n", pass ? "PASS" : "FAIL", c,
                titles[c], g.checks, g.failed);
    std::fflush(stdout);
  }
  return failed_criteria == 0 ? 0 : 1;
}
