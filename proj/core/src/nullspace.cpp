#include "treespde/nullspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace treespde {

KernelBasis kernel_basis(const RationalMatrix& adjacency) {
  return {nullspace(adjacency)};
}

KernelBasis kernel_basis(const MetricTree& tree) {
  return kernel_basis(derive_matrices(tree).adjacency_rational);
}

namespace {

// Connected components of the subgraph induced by `keep`, using only edges
// that `edge_ok` admits. Components come out sorted, ordered by smallest
// member, so the decomposition is deterministic.
std::vector<std::vector<int>> induced_components(
    const MetricTree& tree, const std::vector<char>& keep,
    const std::vector<char>& edge_ok) {
  const int n = tree.vertex_count();
  std::vector<std::vector<int>> comps;
  std::vector<char> vis(n, 0);
  for (int start = 0; start < n; ++start) {
    if (!keep[start] || vis[start]) continue;
    std::vector<int> comp, stack{start};
    vis[start] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int j : tree.incident_edges(v)) {
        if (!edge_ok[j]) continue;
        const Edge& e = tree.edge(j);
        int u = e.tail == v ? e.head : e.tail;
        if (keep[u] && !vis[u]) {
          vis[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

NullDecomposition decompose(const MetricTree& tree) {
  const int n = tree.vertex_count();
  const int m = tree.edge_count();
  NullDecomposition d;
  d.kernel = kernel_basis(tree);

  std::vector<char> in_supp(n, 0), in_core(n, 0);
  for (std::size_t r = 0; r < d.kernel.basis.rows(); ++r)
    for (int v = 0; v < n; ++v)
      if (!d.kernel.basis(r, v).is_zero()) in_supp[v] = 1;
  for (int v = 0; v < n; ++v)
    if (in_supp[v])
      for (int u : tree.neighbors(v)) in_core[u] = 1;
  for (int v = 0; v < n; ++v)
    if (in_supp[v] && in_core[v])
      throw std::logic_error("support vertex adjacent to support vertex");
  for (int v = 0; v < n; ++v) {
    if (in_supp[v]) d.supp.push_back(v);
    if (in_core[v]) d.core.push_back(v);
  }

  std::vector<char> in_stree(n, 0), in_ntree(n, 0);
  for (int v = 0; v < n; ++v) {
    in_stree[v] = in_supp[v] | in_core[v];
    in_ntree[v] = !in_stree[v];
  }
  std::vector<char> all_edges(m, 1);
  std::vector<std::vector<int>> s_comps = induced_components(tree, in_stree, all_edges);
  d.n_trees = induced_components(tree, in_ntree, all_edges);

  // Edges inside an S-tree or inside an N-tree; the rest are connecting.
  for (int j = 0; j < m; ++j) {
    const Edge& e = tree.edge(j);
    bool inside_s = in_stree[e.tail] && in_stree[e.head];
    bool inside_n = in_ntree[e.tail] && in_ntree[e.head];
    if (!inside_s && !inside_n) d.conn_edges.push_back(j);
  }

  for (auto& comp : s_comps) {
    STree s;
    s.vertices = comp;
    std::vector<char> in_this(n, 0);
    for (int v : comp) in_this[v] = 1;
    std::vector<char> atom_edges(m, 0);
    for (int j = 0; j < m; ++j) {
      const Edge& e = tree.edge(j);
      if (!in_this[e.tail] || !in_this[e.head]) continue;
      if (in_core[e.tail] && in_core[e.head])
        s.bond_edges.push_back(j);
      else
        atom_edges[j] = 1;
    }
    s.s_atoms = induced_components(tree, in_this, atom_edges);
    d.s_trees.push_back(std::move(s));
  }
  return d;
}

NoiseFreeBound noise_free_bound(const MetricTree& tree) {
  const int m = tree.edge_count();
  NullDecomposition d = decompose(tree);
  MatchingNumbers mn = matching_number(tree);
  int structural = std::min(m - static_cast<int>(d.supp.size()) +
                                static_cast<int>(d.core.size()),
                            m - 1);
  int matching = std::min(2 * mn.nu - 1, m - 1);
  if (structural != matching)
    throw std::logic_error("noise-free bound forms disagree: structural=" +
                           std::to_string(structural) + " matching=" +
                           std::to_string(matching));
  return {structural, matching};
}

}  // namespace treespde
