#include "treespde/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace treespde {

using ordered_json = nlohmann::ordered_json;

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string edges_label(const std::vector<int>& edges) {
  if (edges.empty()) return "none";
  std::string out;
  for (int j : edges) out += (out.empty() ? "" : ";") + std::to_string(j + 1);
  return out;
}

std::string feller_csv(const FellerSweepResult& result, const NoiseConfig& noise) {
  const std::string label = edges_label(noise.noisy_edges);
  std::string out = "epsilon,estimate,stderr,noisy_edges\n";
  for (std::size_t i = 0; i < result.epsilons.size(); ++i)
    out += format_full(result.epsilons[i]) + "," + format_full(result.estimates[i]) + "," +
           format_full(result.stderrs[i]) + "," + label + "\n";
  return out;
}

std::string reachability_csv(const ReachabilityResult& result, const NoiseConfig& noise) {
  const std::string label = edges_label(noise.noisy_edges);
  std::string out = "family,mode,probability,noisy_edges\n";
  for (const ReachabilityRow& row : result.rows)
    out += std::to_string(row.family) + "," + std::to_string(row.mode) + "," +
           format_full(row.probability) + "," + label + "\n";
  return out;
}

std::string ergodicity_csv(const ErgodicityResult& result) {
  std::string out = "time,init_label,average,stderr\n";
  for (std::size_t a = 0; a < result.labels.size(); ++a)
    for (std::size_t t = 0; t < result.times.size(); ++t)
      out += format_full(result.times[t]) + "," + result.labels[a] + "," +
             format_full(result.averages[a][t]) + "," + format_full(result.stderrs[a][t]) + "\n";
  return out;
}

std::string ergodicity_gap_csv(const ErgodicityResult& result) {
  std::string out = "time,mean_gap\n";
  for (std::size_t t = 0; t < result.times.size(); ++t)
    out += format_full(result.times[t]) + "," + format_full(result.mean_gap[t]) + "\n";
  return out;
}

std::string spectrum_csv(const SpectralBasis& basis) {
  const int m = basis.tree.edge_count();
  std::string out = "mode_index,eigenvalue,family,generator";
  for (int j = 0; j < m; ++j) out += ",cos_e" + std::to_string(j + 1);
  for (int j = 0; j < m; ++j) out += ",sin_e" + std::to_string(j + 1);
  out += "\n";
  for (std::size_t k = 0; k < basis.modes.size(); ++k) {
    const EigenMode& mode = basis.modes[k];
    out += std::to_string(k) + "," + format_full(mode.eigenvalue) + ",";
    out += mode.family == 1 ? "sigma1" : "sigma2";
    out += ",";
    out += mode.family == 1 ? std::to_string(mode.generator_k) : format_full(mode.generator_mu);
    for (int j = 0; j < m; ++j) out += "," + format_full(mode.cos_coeff[j]);
    for (int j = 0; j < m; ++j) out += "," + format_full(mode.sin_coeff[j]);
    out += "\n";
  }
  return out;
}

std::string spectrum_samples_csv(const SpectralBasis& basis, int points_per_edge) {
  std::string out = "mode_index,edge,x,value\n";
  for (std::size_t k = 0; k < basis.modes.size(); ++k)
    for (int j = 0; j < basis.tree.edge_count(); ++j)
      for (int p = 0; p < points_per_edge; ++p) {
        const double x = points_per_edge == 1 ? 0.5 : double(p) / (points_per_edge - 1);
        out += std::to_string(k) + "," + std::to_string(j + 1) + "," + format_full(x) + "," +
               format_full(basis.modes[k].evaluate(j, x)) + "\n";
      }
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory, int coefficients, double tau) {
  std::string out = "step,time";
  for (int k = 0; k < coefficients; ++k) out += ",c" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const long long step = std::llround(trajectory.times[i] / tau);
    out += std::to_string(step) + "," + format_full(trajectory.times[i]);
    for (int k = 0; k < coefficients; ++k) out += "," + format_full(trajectory.path[i][k]);
    out += "\n";
  }
  return out;
}

std::string trajectory_samples_csv(const SpectralBasis& basis, const Trajectory& trajectory,
                                   int points_per_edge) {
  std::string out = "time,edge,x,u\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i)
    for (int j = 0; j < basis.tree.edge_count(); ++j)
      for (int p = 0; p < points_per_edge; ++p) {
        const double x = points_per_edge == 1 ? 0.5 : double(p) / (points_per_edge - 1);
        double u = 0.0;
        for (std::size_t k = 0; k < trajectory.path[i].size(); ++k)
          u += trajectory.path[i][k] * basis.modes[k].evaluate(j, x);
        out += format_full(trajectory.times[i]) + "," + std::to_string(j + 1) + "," +
               format_full(x) + "," + format_full(u) + "\n";
      }
  return out;
}

namespace {

ordered_json one_based(const std::vector<int>& ids) {
  ordered_json arr = ordered_json::array();
  for (int v : ids) arr.push_back(v + 1);
  return arr;
}

ordered_json rational_rows(const RationalMatrix& matrix) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < matrix.cols(); ++c) row.push_back(matrix(r, c).to_string());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string analysis_json(const MetricTree& tree, const NullDecomposition& decomposition,
                          const NoiseFreeBound& bound, const FellerAnalyzer& analyzer,
                          const std::vector<AnalysisVerdict>& verdicts,
                          const SharpnessCertificate* sharpness) {
  ordered_json doc;
  doc["vertices"] = tree.vertex_count();
  doc["edges"] = tree.edge_count();
  doc["supp"] = one_based(decomposition.supp);
  doc["core"] = one_based(decomposition.core);

  ordered_json strees = ordered_json::array();
  for (const STree& s : decomposition.s_trees) {
    ordered_json entry;
    entry["vertices"] = one_based(s.vertices);
    ordered_json atoms = ordered_json::array();
    for (const std::vector<int>& atom : s.s_atoms) atoms.push_back(one_based(atom));
    entry["s_atoms"] = atoms;
    entry["bond_edges"] = one_based(s.bond_edges);
    strees.push_back(entry);
  }
  doc["s_trees"] = strees;

  ordered_json ntrees = ordered_json::array();
  for (const std::vector<int>& component : decomposition.n_trees)
    ntrees.push_back(one_based(component));
  doc["n_trees"] = ntrees;
  doc["conn_edges"] = one_based(decomposition.conn_edges);

  doc["kernel_dimension"] = analyzer.kernel_dimension();
  doc["kernel_basis"] = rational_rows(analyzer.kernel().basis);
  doc["bound"] = bound.bound;
  doc["matching_bound"] = bound.matching_bound;
  doc["assumption_status"] = analyzer.assumption_verified() ? "verified" : "violated";
  if (!analyzer.assumption_verified()) doc["assumption_detail"] = analyzer.assumption_detail();

  ordered_json list = ordered_json::array();
  for (const AnalysisVerdict& v : verdicts) {
    ordered_json entry;
    entry["noise_free_edges"] = one_based(v.noise_free);
    entry["kernel_condition"] = v.decision.kernel_condition;
    entry["strong_feller"] = to_string(v.decision.strong_feller);
    entry["irreducible"] = to_string(v.decision.irreducible);
    if (!v.decision.witness.empty()) {
      ordered_json w = ordered_json::array();
      for (const Rational& value : v.decision.witness) w.push_back(value.to_string());
      entry["witness"] = w;
      entry["witness_kind"] = v.decision.witness_kind;
    }
    list.push_back(entry);
  }
  doc["verdicts"] = list;

  if (sharpness != nullptr) {
    ordered_json cert;
    cert["bound"] = sharpness->bound;
    cert["achieved"] = sharpness->achieved;
    cert["sharp"] = sharpness->sharp;
    cert["witness_noise_free"] = one_based(sharpness->witness_noise_free);
    cert["subsets_checked"] = sharpness->subsets_checked;
    doc["sharpness"] = cert;
  }
  return doc.dump(2) + "\n";
}

std::string manifest_json(const std::string& subcommand,
                          const std::map<std::string, std::string>& config_echo,
                          std::uint64_t seed, double wall_seconds) {
  ordered_json doc;
  doc["subcommand"] = subcommand;
  ordered_json cfg;
  for (const auto& [key, value] : config_echo) cfg[key] = value;
  doc["config"] = cfg;
  doc["seed"] = seed;
  ordered_json versions;
  versions["treespde"] = "1.0.0";
  versions["schema"] = 1;
  doc["versions"] = versions;
  doc["wall_time_seconds"] = wall_seconds;
  return doc.dump(2) + "\n";
}

}  // namespace treespde
