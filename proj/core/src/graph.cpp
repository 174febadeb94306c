#include "treespde/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <stdexcept>

#include "treespde/rng.hpp"

namespace treespde {

std::vector<int> MetricTree::neighbors(int v) const {
  std::vector<int> out;
  out.reserve(incident_[v].size());
  for (int j : incident_[v]) {
    const Edge& e = edges_[j];
    out.push_back(e.tail == v ? e.head : e.tail);
  }
  return out;
}

MetricTree MetricTree::build(int n, const std::vector<std::pair<int, int>>& edge_list) {
  if (n < 2) throw std::invalid_argument("tree needs at least 2 vertices");
  if (edge_list.empty()) throw std::invalid_argument("edge list is empty");
  if (static_cast<int>(edge_list.size()) != n - 1)
    throw std::invalid_argument("tree requires exactly n-1 edges, got " +
                                std::to_string(edge_list.size()) + " for n=" +
                                std::to_string(n));

  MetricTree t;
  t.n_ = n;
  t.incident_.assign(n, {});
  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : edge_list) {
    if (a < 1 || a > n || b < 1 || b > n)
      throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(a) +
                                  "," + std::to_string(b) + ")");
    if (a == b) throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
    auto key = std::minmax(a, b);
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ")");
    int j = static_cast<int>(t.edges_.size());
    t.edges_.push_back({a - 1, b - 1});
    t.incident_[a - 1].push_back(j);
    t.incident_[b - 1].push_back(j);
  }

  // Connectivity; with n-1 simple edges this also rules out cycles.
  std::vector<bool> vis(n, false);
  std::queue<int> q;
  q.push(0);
  vis[0] = true;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : t.neighbors(v))
      if (!vis[u]) {
        vis[u] = true;
        ++reached;
        q.push(u);
      }
  }
  if (reached != n) throw std::invalid_argument("graph is not connected");
  return t;
}

MetricTree MetricTree::with_reversed_edge(int j) const {
  MetricTree t = *this;
  std::swap(t.edges_[j].tail, t.edges_[j].head);
  return t;
}

NoiseConfig NoiseConfig::from_noise_free(const MetricTree& tree,
                                         const std::vector<int>& noise_free_0based) {
  const int m = tree.edge_count();
  NoiseConfig cfg;
  cfg.noisy_mask.assign(m, 1);
  for (int z : noise_free_0based) {
    if (z < 0 || z >= m)
      throw std::invalid_argument("noise-free edge id " + std::to_string(z + 1) +
                                  " out of range on a graph with " + std::to_string(m) +
                                  " edges");
    if (!cfg.noisy_mask[z])
      throw std::invalid_argument("duplicate noise-free edge id " + std::to_string(z + 1));
    cfg.noisy_mask[z] = 0;
  }
  for (int j = 0; j < m; ++j)
    (cfg.noisy_mask[j] ? cfg.noisy_edges : cfg.noise_free_edges).push_back(j);
  return cfg;
}

GraphMatrices derive_matrices(const MetricTree& tree) {
  const int n = tree.vertex_count();
  const int m = tree.edge_count();
  GraphMatrices g;
  g.n = n;
  g.m = m;
  g.adjacency.assign(n, std::vector<long long>(n, 0));
  g.incidence.assign(n, std::vector<long long>(m, 0));
  g.phi_plus.assign(n, std::vector<long long>(m, 0));
  g.phi_minus.assign(n, std::vector<long long>(m, 0));
  g.phi_signed.assign(n, std::vector<long long>(m, 0));
  g.degree.assign(n, 0);

  for (int j = 0; j < m; ++j) {
    const Edge& e = tree.edge(j);
    g.adjacency[e.tail][e.head] = 1;
    g.adjacency[e.head][e.tail] = 1;
    g.incidence[e.tail][j] = 1;
    g.incidence[e.head][j] = 1;
    g.phi_plus[e.tail][j] = 1;
    g.phi_minus[e.head][j] = 1;
    g.phi_signed[e.tail][j] = 1;
    g.phi_signed[e.head][j] = -1;
    ++g.degree[e.tail];
    ++g.degree[e.head];
  }

  g.adjacency_rational = RationalMatrix(n, n);
  g.normalized_adjacency = RationalMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      g.adjacency_rational(i, k) = Rational(g.adjacency[i][k]);
      g.normalized_adjacency(i, k) = Rational(g.adjacency[i][k], g.degree[i]);
    }
  return g;
}

MatchingNumbers matching_number(const MetricTree& tree) {
  const int n = tree.vertex_count();
  // BFS order from vertex 0; processing vertices deepest-first and greedily
  // matching an unmatched vertex to its unmatched parent is exact on trees.
  std::vector<int> order, parent(n, -1);
  std::vector<bool> vis(n, false);
  order.reserve(n);
  order.push_back(0);
  vis[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int v = order[i];
    for (int u : tree.neighbors(v))
      if (!vis[u]) {
        vis[u] = true;
        parent[u] = v;
        order.push_back(u);
      }
  }
  std::vector<bool> matched(n, false);
  int nu = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (parent[v] < 0) continue;
    if (!matched[v] && !matched[parent[v]]) {
      matched[v] = matched[parent[v]] = true;
      ++nu;
    }
  }
  return {nu, n - nu};
}

int matching_number_hopcroft_karp(const MetricTree& tree) {
  const int n = tree.vertex_count();
  std::vector<int> color = bipartition(tree);
  std::vector<int> left;  // vertices with color 0
  std::vector<int> left_id(n, -1);
  for (int v = 0; v < n; ++v)
    if (color[v] == 0) {
      left_id[v] = static_cast<int>(left.size());
      left.push_back(v);
    }
  const int L = static_cast<int>(left.size());
  const int INF = 1 << 30;
  std::vector<int> match_l(L, -1), match_r(n, -1), dist(L);

  auto bfs = [&]() {
    std::queue<int> q;
    for (int i = 0; i < L; ++i) {
      if (match_l[i] < 0) {
        dist[i] = 0;
        q.push(i);
      } else {
        dist[i] = INF;
      }
    }
    bool found = false;
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int u : tree.neighbors(left[i])) {
        int w = match_r[u];
        if (w < 0) {
          found = true;
        } else if (dist[w] == INF) {
          dist[w] = dist[i] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };
  std::function<bool(int)> dfs = [&](int i) {
    for (int u : tree.neighbors(left[i])) {
      int w = match_r[u];
      if (w < 0 || (dist[w] == dist[i] + 1 && dfs(w))) {
        match_l[i] = u;
        match_r[u] = i;
        return true;
      }
    }
    dist[i] = INF;
    return false;
  };

  int nu = 0;
  while (bfs())
    for (int i = 0; i < L; ++i)
      if (match_l[i] < 0 && dfs(i)) ++nu;
  return nu;
}

std::vector<int> bipartition(const MetricTree& tree) {
  const int n = tree.vertex_count();
  std::vector<int> color(n, -1);
  std::queue<int> q;
  q.push(0);
  color[0] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : tree.neighbors(v))
      if (color[u] < 0) {
        color[u] = 1 - color[v];
        q.push(u);
      }
  }
  return color;
}

MetricTree preset_tree(const std::string& name) {
  auto parse_size = [&](const std::string& prefix) -> int {
    std::string num = name.substr(prefix.size());
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad preset size in '" + name + "'");
    int m = std::stoi(num);
    if (m < 1) throw std::invalid_argument("preset size must be >= 1");
    return m;
  };
  if (name.rfind("chain:", 0) == 0) {
    int m = parse_size("chain:");
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= m; ++i) edges.emplace_back(i, i + 1);
    return MetricTree::build(m + 1, edges);
  }
  if (name.rfind("star:", 0) == 0) {
    int m = parse_size("star:");
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= m; ++i) edges.emplace_back(i, m + 1);
    return MetricTree::build(m + 1, edges);
  }
  if (name == "example-3.6")
    return MetricTree::build(6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {5, 6}});
  if (name == "t-prime")
    return MetricTree::build(
        8, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {5, 6}, {6, 7}, {6, 8}});
  throw std::invalid_argument("unknown graph preset '" + name + "'");
}

MetricTree random_tree(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random tree needs n >= 2");
  SplitMix64 sm(seed);
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges = {{1, 2}};
  } else {
    std::vector<int> pruefer(n - 2);
    for (int& p : pruefer) p = static_cast<int>(sm.next() % n);
    std::vector<int> deg(n, 1);
    for (int p : pruefer) ++deg[p];
    std::set<int> leaves;
    for (int v = 0; v < n; ++v)
      if (deg[v] == 1) leaves.insert(v);
    for (int p : pruefer) {
      int leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      edges.emplace_back(leaf + 1, p + 1);
      if (--deg[p] == 1) leaves.insert(p);
    }
    int a = *leaves.begin(), b = *std::next(leaves.begin());
    edges.emplace_back(a + 1, b + 1);
  }
  for (auto& e : edges)
    if (sm.next() & 1) std::swap(e.first, e.second);
  return MetricTree::build(n, edges);
}

}  // namespace treespde
