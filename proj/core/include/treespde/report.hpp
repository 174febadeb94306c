#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treespde/engine.hpp"
#include "treespde/experiments.hpp"
#include "treespde/feller.hpp"
#include "treespde/nullspace.hpp"
#include "treespde/spectrum.hpp"

namespace treespde {

// Shortest decimal that round-trips a double exactly.
std::string format_full(double x);

// Semicolon-joined 1-based edge ids, or "none". Input ids are 0-based.
std::string edges_label(const std::vector<int>& edges);

std::string feller_csv(const FellerSweepResult& result, const NoiseConfig& noise);
std::string reachability_csv(const ReachabilityResult& result, const NoiseConfig& noise);
std::string ergodicity_csv(const ErgodicityResult& result);
std::string ergodicity_gap_csv(const ErgodicityResult& result);

std::string spectrum_csv(const SpectralBasis& basis);
std::string spectrum_samples_csv(const SpectralBasis& basis, int points_per_edge);

// Recorded coefficient path; `tau` recovers integer step ids from times.
std::string trajectory_csv(const Trajectory& trajectory, int coefficients, double tau);
std::string trajectory_samples_csv(const SpectralBasis& basis, const Trajectory& trajectory,
                                   int points_per_edge);

struct AnalysisVerdict {
  std::vector<int> noise_free;  // 0-based edge ids
  FellerDecision decision;
};

std::string analysis_json(const MetricTree& tree, const NullDecomposition& decomposition,
                          const NoiseFreeBound& bound, const FellerAnalyzer& analyzer,
                          const std::vector<AnalysisVerdict>& verdicts,
                          const SharpnessCertificate* sharpness);

std::string manifest_json(const std::string& subcommand,
                          const std::map<std::string, std::string>& config_echo,
                          std::uint64_t seed, double wall_seconds);

}  // namespace treespde
