#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "treespde/engine.hpp"
#include "treespde/graph.hpp"
#include "treespde/spectrum.hpp"

namespace treespde {

// A raw (pre-orthonormalization) eigenmode expressed in the truncated
// orthonormal basis; coefficients live on the same-eigenvalue block only.
struct ProbeMode {
  double eigenvalue = 0.0;
  std::vector<std::pair<int, double>> coeffs;  // (basis index, coefficient)
};

struct FamilyInfo {
  int id = 0;        // 1-based; id 0 is the graph-independent ladder
  double mu = 0.0;   // generating adjacency eigenvalue
  bool kernel = false;
  int column = 0;    // eigenvector column, or kernel basis row
};

// Perturbation directions indexed by adjacency eigenvector: nonzero interior
// eigenvalues in descending order, then the kernel basis rows; family 0 is
// the graph-independent ladder. Probes enumerate the family's modes that are
// entirely inside the truncated basis, ascending eigenvalue.
class FamilyCatalog {
 public:
  explicit FamilyCatalog(const SpectralBasis& basis);

  int family_count() const { return static_cast<int>(families_.size()); }
  const std::vector<FamilyInfo>& families() const { return families_; }
  // family in [0, family_count()]
  const std::vector<ProbeMode>& probes(int family) const;

 private:
  std::vector<FamilyInfo> families_;
  std::vector<std::vector<ProbeMode>> probes_;  // [0] = ladder, then families
};

double probe_coefficient(const std::vector<double>& state, const ProbeMode& probe);

// Probes for an arbitrary vertex-value vector interpolated at the admissible
// frequencies of the adjacency eigenvalue mu, expanded onto the basis; same
// whole-block truncation rule as the catalog. Lets callers probe along an
// explicit direction (e.g. an analyzer witness) instead of a catalog family.
std::vector<ProbeMode> vertex_mode_probes(const SpectralBasis& basis,
                                          const std::vector<double>& vertex_values, double mu);

struct MonteCarloParams {
  int trajectories = 500;
  std::uint64_t seed = 1;
  int threads = 0;  // <= 0: hardware concurrency
};

// Sign-readout curve: start at eps * sum of family probes, read off the sign
// of the first probe coefficient at the horizon, report |mean sign| per eps.
// Trajectories share noise across eps values (common random numbers).
struct FellerSweepResult {
  int family = 0;
  int test_mode = 1;
  std::vector<double> epsilons;
  std::vector<double> estimates;
  std::vector<double> stderrs;
  int diverged = 0;
};

FellerSweepResult feller_sweep(const SpectralBasis& basis, const FamilyCatalog& catalog,
                               const NoiseConfig& config, const DriftPreset& drift,
                               int family, int test_mode, const std::vector<double>& epsilons,
                               const IntegratorOptions& options, const MonteCarloParams& mc);

// Same sweep with an explicit perturbation set and test probe.
FellerSweepResult feller_sweep_probes(const SpectralBasis& basis,
                                      const std::vector<ProbeMode>& perturbation,
                                      const ProbeMode& test, const NoiseConfig& config,
                                      const DriftPreset& drift,
                                      const std::vector<double>& epsilons,
                                      const IntegratorOptions& options,
                                      const MonteCarloParams& mc);

// eps = 10^{-4k/7}, k = 0..7, descending.
std::vector<double> default_epsilon_grid();

// Hitting fractions from the zero field: P(|<X(T), probe>| > delta) per
// family and probe. Adjacency families first, the ladder (family 0) last.
struct ReachabilityRow {
  int family = 0;
  int mode = 0;  // 1-based within the family
  double probability = 0.0;
};

struct ReachabilityResult {
  double delta = 1e-6;
  std::vector<ReachabilityRow> rows;
  int diverged = 0;
};

ReachabilityResult reachability(const SpectralBasis& basis, const FamilyCatalog& catalog,
                                const NoiseConfig& config, const DriftPreset& drift,
                                double delta, const IntegratorOptions& options,
                                const MonteCarloParams& mc);

// Time averages of sin ||X(t)|| from three initial fields (zero, the sum of
// nonconstant graph-independent modes, a Gaussian field drawn once), plus the
// mean common-noise gap ||X(t; second) - X(t; zero)||.
struct ErgodicityResult {
  std::vector<double> times;
  std::array<std::string, 3> labels;
  std::array<std::vector<double>, 3> averages;
  std::array<std::vector<double>, 3> stderrs;
  std::vector<double> mean_gap;
  double initial_gap = 0.0;
  int diverged = 0;
};

ErgodicityResult ergodicity_curves(const SpectralBasis& basis, const NoiseConfig& config,
                                   const DriftPreset& drift, int record_stride,
                                   const IntegratorOptions& options,
                                   const MonteCarloParams& mc);

}  // namespace treespde
