#include "treespde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treespde/parallel.hpp"
#include "treespde/rng.hpp"

namespace treespde {

namespace {

// Expands the vertex interpolation at every admissible frequency of mu onto
// the basis, per-frequency, keeping only whole eigenvalue blocks.
std::vector<ProbeMode> expand_probes(const SpectralBasis& basis,
                                     const std::vector<double>& vertex_values, double mu,
                                     int group_size) {
  const double lam_max = basis.modes.empty() ? 0.0 : basis.modes.back().eigenvalue;
  std::vector<ProbeMode> plist;
  for (double w : admissible_frequencies(mu, basis.freq_max)) {
    const double lam = w * w;
    if (lam > lam_max + 1e-9 * std::max(1.0, lam_max)) break;
    std::vector<int> block;
    for (int b = 0; b < basis.size(); ++b)
      if (std::abs(basis.modes[b].eigenvalue - lam) <= 1e-9 * std::max(1.0, lam))
        block.push_back(b);
    // A partially truncated eigenvalue block cannot carry the raw mode;
    // everything above it is truncated too.
    if (static_cast<int>(block.size()) != group_size) break;
    const EigenMode raw = make_vertex_mode(basis.tree, vertex_values, w);
    ProbeMode p;
    p.eigenvalue = lam;
    double check = 0.0;
    for (int b : block) {
      const double v = inner_product(raw, basis.modes[b]);
      if (std::abs(v) > 1e-12) p.coeffs.emplace_back(b, v);
      check += v * v;
    }
    if (std::abs(check - 1.0) > 1e-8)
      throw std::logic_error("probe expansion escapes its eigenvalue block");
    plist.push_back(std::move(p));
  }
  return plist;
}

}  // namespace

FamilyCatalog::FamilyCatalog(const SpectralBasis& basis) {
  const AdjacencySpectrum& sp = basis.spectrum;

  // Family 0: the graph-independent ladder sits in the basis untouched by
  // orthonormalization (its eigenvalues are simple), singleton coefficients.
  probes_.emplace_back();
  for (int b = 0; b < basis.size(); ++b) {
    if (basis.modes[b].family != 1) continue;
    ProbeMode p;
    p.eigenvalue = basis.modes[b].eigenvalue;
    p.coeffs.emplace_back(b, 1.0);
    probes_[0].push_back(std::move(p));
  }

  std::vector<std::pair<int, int>> generators;  // (group, column)
  for (int gi = static_cast<int>(sp.groups.size()) - 1; gi >= 0; --gi) {
    const AdjacencyEigenGroup& g = sp.groups[gi];
    if (g.zero_group) continue;
    if (g.mu <= -1.0 + 1e-9 || g.mu >= 1.0 - 1e-9) continue;
    for (int ci = 0; ci < static_cast<int>(g.vectors.size()); ++ci)
      generators.emplace_back(gi, ci);
  }
  for (int gi = 0; gi < static_cast<int>(sp.groups.size()); ++gi)
    if (sp.groups[gi].zero_group)
      for (int ci = 0; ci < static_cast<int>(sp.groups[gi].vectors.size()); ++ci)
        generators.emplace_back(gi, ci);

  for (const auto& [gi, ci] : generators) {
    const AdjacencyEigenGroup& g = sp.groups[gi];
    FamilyInfo info;
    info.id = static_cast<int>(families_.size()) + 1;
    info.mu = g.mu;
    info.kernel = g.zero_group;
    info.column = ci;
    families_.push_back(info);

    probes_.push_back(
        expand_probes(basis, g.vectors[ci], g.mu, static_cast<int>(g.vectors.size())));
  }
}

const std::vector<ProbeMode>& FamilyCatalog::probes(int family) const {
  if (family < 0 || family >= static_cast<int>(probes_.size()))
    throw std::out_of_range("family index out of range");
  return probes_[family];
}

double probe_coefficient(const std::vector<double>& state, const ProbeMode& probe) {
  double acc = 0.0;
  for (const auto& [b, v] : probe.coeffs) acc += v * state[b];
  return acc;
}

std::vector<ProbeMode> vertex_mode_probes(const SpectralBasis& basis,
                                          const std::vector<double>& vertex_values, double mu) {
  for (const AdjacencyEigenGroup& g : basis.spectrum.groups)
    if (std::abs(g.mu - mu) <= 1e-9)
      return expand_probes(basis, vertex_values, g.mu, static_cast<int>(g.vectors.size()));
  throw std::invalid_argument("no adjacency eigenvalue group at the requested mu");
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> eps;
  for (int k = 0; k < 8; ++k) eps.push_back(std::pow(10.0, -4.0 * k / 7.0));
  return eps;
}

FellerSweepResult feller_sweep(const SpectralBasis& basis, const FamilyCatalog& catalog,
                               const NoiseConfig& config, const DriftPreset& drift,
                               int family, int test_mode, const std::vector<double>& epsilons,
                               const IntegratorOptions& options, const MonteCarloParams& mc) {
  const std::vector<ProbeMode>& plist = catalog.probes(family);
  if (plist.empty()) throw std::invalid_argument("family has no probes inside this basis");
  if (test_mode < 1 || test_mode > static_cast<int>(plist.size()))
    throw std::invalid_argument("test mode out of range for the family");
  FellerSweepResult out = feller_sweep_probes(basis, plist, plist[test_mode - 1], config, drift,
                                              epsilons, options, mc);
  out.family = family;
  out.test_mode = test_mode;
  return out;
}

FellerSweepResult feller_sweep_probes(const SpectralBasis& basis,
                                      const std::vector<ProbeMode>& perturbation,
                                      const ProbeMode& test, const NoiseConfig& config,
                                      const DriftPreset& drift,
                                      const std::vector<double>& epsilons,
                                      const IntegratorOptions& options,
                                      const MonteCarloParams& mc) {
  if (perturbation.empty()) throw std::invalid_argument("empty perturbation set");
  if (epsilons.empty()) throw std::invalid_argument("empty perturbation grid");

  std::vector<double> direction(basis.size(), 0.0);
  for (const ProbeMode& p : perturbation)
    for (const auto& [b, v] : p.coeffs) direction[b] += v;

  const TrajectoryRunner runner(basis, config, drift, options);
  const int traj = mc.trajectories;
  const int egrid = static_cast<int>(epsilons.size());
  std::vector<double> signs(static_cast<std::size_t>(traj) * egrid, 0.0);
  std::vector<char> bad(static_cast<std::size_t>(traj) * egrid, 0);

  parallel_for(traj, mc.threads, [&](int i) {
    // One stream per trajectory, reused across eps: common random numbers.
    const std::uint64_t stream = derive_stream(mc.seed, static_cast<std::uint64_t>(i));
    std::vector<double> x0(basis.size());
    for (int e = 0; e < egrid; ++e) {
      for (int k = 0; k < basis.size(); ++k) x0[k] = epsilons[e] * direction[k];
      const Trajectory tr = runner.run(x0, stream);
      const std::size_t slot = static_cast<std::size_t>(i) * egrid + e;
      if (tr.diverged) {
        bad[slot] = 1;
        continue;
      }
      const double r = probe_coefficient(tr.terminal, test);
      signs[slot] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    }
  });

  FellerSweepResult out;
  out.epsilons = epsilons;
  for (int e = 0; e < egrid; ++e) {
    KahanSum sum, sumsq;
    long long good = 0;
    for (int i = 0; i < traj; ++i) {
      const std::size_t slot = static_cast<std::size_t>(i) * egrid + e;
      if (bad[slot]) {
        ++out.diverged;
        continue;
      }
      sum.add(signs[slot]);
      sumsq.add(signs[slot] * signs[slot]);
      ++good;
    }
    const double mean = good > 0 ? sum.value() / good : 0.0;
    double se = 0.0;
    if (good > 1) {
      const double var = std::max(0.0, (sumsq.value() - good * mean * mean) / (good - 1));
      se = std::sqrt(var / good);
    }
    out.estimates.push_back(std::abs(mean));
    out.stderrs.push_back(se);
  }
  return out;
}

ReachabilityResult reachability(const SpectralBasis& basis, const FamilyCatalog& catalog,
                                const NoiseConfig& config, const DriftPreset& drift,
                                double delta, const IntegratorOptions& options,
                                const MonteCarloParams& mc) {
  if (!(delta > 0.0)) throw std::invalid_argument("hitting threshold must be positive");
  const TrajectoryRunner runner(basis, config, drift, options);

  std::vector<std::pair<int, int>> layout;
  for (int f = 1; f <= catalog.family_count(); ++f)
    for (int l = 0; l < static_cast<int>(catalog.probes(f).size()); ++l)
      layout.emplace_back(f, l);
  for (int l = 0; l < static_cast<int>(catalog.probes(0).size()); ++l)
    layout.emplace_back(0, l);

  const int rows = static_cast<int>(layout.size());
  const int traj = mc.trajectories;
  std::vector<char> hits(static_cast<std::size_t>(traj) * rows, 0);
  std::vector<char> bad(traj, 0);

  parallel_for(traj, mc.threads, [&](int i) {
    const Trajectory tr = runner.run({}, derive_stream(mc.seed, static_cast<std::uint64_t>(i)));
    if (tr.diverged) {
      bad[i] = 1;
      return;
    }
    for (int r = 0; r < rows; ++r) {
      const ProbeMode& p = catalog.probes(layout[r].first)[layout[r].second];
      if (std::abs(probe_coefficient(tr.terminal, p)) > delta)
        hits[static_cast<std::size_t>(i) * rows + r] = 1;
    }
  });

  ReachabilityResult out;
  out.delta = delta;
  long long good = 0;
  for (int i = 0; i < traj; ++i)
    if (!bad[i]) ++good;
  out.diverged = traj - static_cast<int>(good);
  for (int r = 0; r < rows; ++r) {
    long long count = 0;
    for (int i = 0; i < traj; ++i)
      if (!bad[i] && hits[static_cast<std::size_t>(i) * rows + r]) ++count;
    ReachabilityRow row;
    row.family = layout[r].first;
    row.mode = layout[r].second + 1;
    row.probability = good > 0 ? static_cast<double>(count) / good : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

ErgodicityResult ergodicity_curves(const SpectralBasis& basis, const NoiseConfig& config,
                                   const DriftPreset& drift, int record_stride,
                                   const IntegratorOptions& options,
                                   const MonteCarloParams& mc) {
  if (record_stride < 1) throw std::invalid_argument("record stride must be >= 1");
  IntegratorOptions opt = options;
  opt.record_stride = record_stride;
  const TrajectoryRunner runner(basis, config, drift, opt);
  const int n = basis.size();
  const int steps = runner.steps();

  std::vector<double> times;
  times.push_back(0.0);
  for (int s = 1; s <= steps; ++s)
    if (s % record_stride == 0 || s == steps) times.push_back(s * opt.tau);
  const int nodes = static_cast<int>(times.size());

  std::array<std::vector<double>, 3> inits;
  inits[0].assign(n, 0.0);
  inits[1].assign(n, 0.0);
  for (int k = 0; k < n; ++k)
    if (basis.modes[k].family == 1 && basis.modes[k].generator_k >= 1) inits[1][k] = 1.0;
  inits[2].assign(n, 0.0);
  {
    // Drawn once; every trajectory starts the third curve from this field.
    NormalSampler field(derive_stream(mc.seed ^ 0xA076BB5F7F439AD3ULL, 0));
    for (int k = 1; k < n; ++k) inits[2][k] = field.next();
  }

  const int traj = mc.trajectories;
  std::vector<double> psi(static_cast<std::size_t>(traj) * 3 * nodes, 0.0);
  std::vector<double> gap(static_cast<std::size_t>(traj) * nodes, 0.0);
  std::vector<char> bad(traj, 0);

  parallel_for(traj, mc.threads, [&](int i) {
    const std::uint64_t stream = derive_stream(mc.seed, static_cast<std::uint64_t>(i));
    std::array<Trajectory, 3> tr;
    for (int a = 0; a < 3; ++a) {
      tr[a] = runner.run(inits[a], stream);  // same noise for all three starts
      if (tr[a].diverged || static_cast<int>(tr[a].path.size()) != nodes) {
        bad[i] = 1;
        return;
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int t = 0; t < nodes; ++t) {
        double norm2 = 0.0;
        for (int k = 0; k < n; ++k) norm2 += tr[a].path[t][k] * tr[a].path[t][k];
        psi[(static_cast<std::size_t>(i) * 3 + a) * nodes + t] = std::sin(std::sqrt(norm2));
      }
    }
    for (int t = 0; t < nodes; ++t) {
      double norm2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = tr[1].path[t][k] - tr[0].path[t][k];
        norm2 += d * d;
      }
      gap[static_cast<std::size_t>(i) * nodes + t] = std::sqrt(norm2);
    }
  });

  ErgodicityResult out;
  out.times = times;
  out.labels = {"zero", "sigma1_sum", "gaussian"};
  {
    double norm2 = 0.0;
    for (int k = 0; k < n; ++k) norm2 += inits[1][k] * inits[1][k];
    out.initial_gap = std::sqrt(norm2);
  }
  long long good = 0;
  for (int i = 0; i < traj; ++i)
    if (!bad[i]) ++good;
  out.diverged = traj - static_cast<int>(good);
  if (good == 0) throw std::runtime_error("every trajectory diverged");

  for (int a = 0; a < 3; ++a) {
    out.averages[a].assign(nodes, 0.0);
    out.stderrs[a].assign(nodes, 0.0);
    for (int t = 0; t < nodes; ++t) {
      KahanSum sum, sumsq;
      for (int i = 0; i < traj; ++i) {
        if (bad[i]) continue;
        const double x = psi[(static_cast<std::size_t>(i) * 3 + a) * nodes + t];
        sum.add(x);
        sumsq.add(x * x);
      }
      const double mean = sum.value() / good;
      out.averages[a][t] = mean;
      if (good > 1) {
        const double var = std::max(0.0, (sumsq.value() - good * mean * mean) / (good - 1));
        out.stderrs[a][t] = std::sqrt(var / good);
      }
    }
  }
  out.mean_gap.assign(nodes, 0.0);
  for (int t = 0; t < nodes; ++t) {
    KahanSum sum;
    for (int i = 0; i < traj; ++i)
      if (!bad[i]) sum.add(gap[static_cast<std::size_t>(i) * nodes + t]);
    out.mean_gap[t] = sum.value() / good;
  }
  return out;
}

}  // namespace treespde
