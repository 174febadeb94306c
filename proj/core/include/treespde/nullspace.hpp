#pragma once

#include <vector>

#include "treespde/graph.hpp"
#include "treespde/rational.hpp"

namespace treespde {

// Exact basis of the adjacency null space. Rows of `basis` are the basis
// vectors; the matrix is in reduced row echelon form, which is unique per
// subspace, so kernels compare row by row.
struct KernelBasis {
  RationalMatrix basis;  // d x n
  std::size_t dimension() const { return basis.rows(); }
};

KernelBasis kernel_basis(const RationalMatrix& adjacency);
KernelBasis kernel_basis(const MetricTree& tree);

// One connected component of the subgraph induced by Supp and its neighbors,
// split further into atoms by removing edges joining two core vertices.
struct STree {
  std::vector<int> vertices;               // sorted, 0-based
  std::vector<std::vector<int>> s_atoms;   // atom vertex sets, each sorted
  std::vector<int> bond_edges;             // edge ids between two core vertices
};

struct NullDecomposition {
  std::vector<int> supp;                   // vertices carrying a nonzero kernel entry
  std::vector<int> core;                   // neighbors of supp
  std::vector<STree> s_trees;
  std::vector<std::vector<int>> n_trees;   // components of the remainder
  std::vector<int> conn_edges;             // edges joining an n-tree to a core vertex
  KernelBasis kernel;
};

NullDecomposition decompose(const MetricTree& tree);

// Sharp upper bound on the number of noise-free edges compatible with a
// strong Feller semigroup, in both equivalent forms. The constructor of this
// result asserts the two forms agree and throws std::logic_error otherwise.
struct NoiseFreeBound {
  int bound;           // min{m - |Supp| + |Core|, m - 1}
  int matching_bound;  // min{2 nu - 1, m - 1}
};

NoiseFreeBound noise_free_bound(const MetricTree& tree);

}  // namespace treespde
