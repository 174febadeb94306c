#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "treespde/rational.hpp"

namespace treespde {

// Oriented edge; tail = e(0), head = e(1), both 0-based internal vertex ids.
// The edge is parameterized on [0,1] from tail to head.
struct Edge {
  int tail;
  int head;
};

// Finite connected tree with unit-length oriented edges. Vertex and edge ids
// are 1-based in all I/O and 0-based in every in-memory structure.
class MetricTree {
public:
  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int j) const { return edges_[j]; }

  // Edge indices incident to a vertex.
  const std::vector<int>& incident_edges(int v) const { return incident_[v]; }
  int degree(int v) const { return static_cast<int>(incident_[v].size()); }

  // Neighboring vertices of a vertex.
  std::vector<int> neighbors(int v) const;

  // Throws std::invalid_argument unless the 1-based edge list describes a
  // connected acyclic simple graph with n vertices and n-1 edges.
  static MetricTree build(int n, const std::vector<std::pair<int, int>>& edge_list);

  // Same tree with one edge's orientation reversed (for invariance tests).
  MetricTree with_reversed_edge(int j) const;

private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

// Partition of the edge set into noisy edges Y and noise-free edges Z.
struct NoiseConfig {
  std::vector<int> noisy_edges;       // Y, 0-based, sorted
  std::vector<int> noise_free_edges;  // Z, 0-based, sorted
  std::vector<char> noisy_mask;       // size m, noisy_mask[j] != 0 iff j in Y

  bool all_noisy() const { return noise_free_edges.empty(); }
  bool none_noisy() const { return noisy_edges.empty(); }

  // Builds the partition from Z; throws std::invalid_argument on ids outside
  // [0, m) or duplicates.
  static NoiseConfig from_noise_free(const MetricTree& tree,
                                     const std::vector<int>& noise_free_0based);
};

// Matrix bundle derived from a tree. Integer matrices are exact; the
// normalized adjacency D^{-1}A is exact rational.
struct GraphMatrices {
  int n = 0;
  int m = 0;
  std::vector<std::vector<long long>> adjacency;   // A, n x n
  std::vector<std::vector<long long>> incidence;   // M, n x m, 0/1
  std::vector<std::vector<long long>> phi_plus;    // n x m, 1 at (v, j) iff e_j(0) = v
  std::vector<std::vector<long long>> phi_minus;   // n x m, 1 at (v, j) iff e_j(1) = v
  std::vector<std::vector<long long>> phi_signed;  // phi_plus - phi_minus
  std::vector<long long> degree;                   // diagonal of D
  RationalMatrix normalized_adjacency;             // D^{-1} A
  RationalMatrix adjacency_rational;               // A as rationals
};

GraphMatrices derive_matrices(const MetricTree& tree);

struct MatchingNumbers {
  int nu;     // maximum matching size
  int alpha;  // independence number, alpha = n - nu on trees
};

// Maximum matching via the greedy leaf dynamic program (exact on trees).
MatchingNumbers matching_number(const MetricTree& tree);

// Maximum matching via Hopcroft-Karp on the bipartition (general method kept
// as an independent cross-check of the tree DP).
int matching_number_hopcroft_karp(const MetricTree& tree);

// Two-coloring; color[v] in {0,1}, vertex 0 gets color 0, every edge crosses.
std::vector<int> bipartition(const MetricTree& tree);

// Built-in graphs: "chain:<m>", "star:<m>" (center = last vertex, edges
// oriented leaf -> center), "example-3.6", "t-prime".
MetricTree preset_tree(const std::string& name);

// Uniform random tree from a seeded Pruefer sequence, with random edge
// orientations; used by property tests and benchmarks.
MetricTree random_tree(int n, std::uint64_t seed);

}  // namespace treespde
