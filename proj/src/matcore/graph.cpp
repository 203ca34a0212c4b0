#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "arrowsdp/matcore.hpp"

namespace arrowsdp {

namespace {

void check_node(int v, int n) {
  if (v < 0 || v >= n) {
    throw DomainError("node " + std::to_string(v) + " out of range [0, " +
                      std::to_string(n) + ")");
  }
}

std::vector<int> positions(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n) {
    throw DomainError("elimination order is not a permutation of the nodes");
  }
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    check_node(order[k], n);
    if (pos[order[k]] != -1) {
      throw DomainError("elimination order repeats a node");
    }
    pos[order[k]] = static_cast<int>(k);
  }
  return pos;
}

// Later neighbours of v in the order described by pos, sorted by position.
std::vector<int> higher_neighbors(const SparsityGraph& g,
                                  const std::vector<int>& pos, int v) {
  std::vector<int> h;
  for (int u : g.neighbors(v)) {
    if (pos[u] > pos[v]) h.push_back(u);
  }
  std::sort(h.begin(), h.end(),
            [&](int a, int b) { return pos[a] < pos[b]; });
  return h;
}

}  // namespace

SparsityGraph::SparsityGraph(int n_nodes) {
  if (n_nodes < 0) throw DomainError("negative node count");
  adj_.resize(static_cast<std::size_t>(n_nodes));
}

SparsityGraph SparsityGraph::from_edges(
    int n_nodes, std::span<const std::pair<int, int>> edges) {
  SparsityGraph g(n_nodes);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

SparsityGraph SparsityGraph::complete(int n_nodes) {
  SparsityGraph g(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) {
      if (i != j) g.adj_[i].push_back(j);
    }
  }
  return g;
}

std::size_t SparsityGraph::n_edges() const noexcept {
  std::size_t deg = 0;
  for (const auto& a : adj_) deg += a.size();
  return deg / 2;
}

void SparsityGraph::add_edge(int i, int j) {
  const int n = n_nodes();
  check_node(i, n);
  check_node(j, n);
  if (i == j) throw DomainError("self loops are not allowed");
  auto insert = [](std::vector<int>& a, int v) {
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) a.insert(it, v);
  };
  insert(adj_[i], j);
  insert(adj_[j], i);
}

bool SparsityGraph::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_nodes() || j >= n_nodes()) return false;
  return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::vector<std::pair<int, int>> SparsityGraph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n_nodes(); ++i) {
    for (int j : adj_[i]) {
      if (i < j) e.emplace_back(i, j);
    }
  }
  return e;
}

bool SparsityGraph::is_subgraph_of(const SparsityGraph& other) const {
  if (other.n_nodes() != n_nodes()) return false;
  for (int i = 0; i < n_nodes(); ++i) {
    if (!std::includes(other.adj_[i].begin(), other.adj_[i].end(),
                       adj_[i].begin(), adj_[i].end())) {
      return false;
    }
  }
  return true;
}

SparsityGraph sparsity_graph(const SymMat& a, double zero_tol) {
  SparsityGraph g(a.dim());
  for (const auto& e : a.entries()) {
    if (e.row != e.col && std::abs(e.value) > zero_tol) g.add_edge(e.row, e.col);
  }
  return g;
}

std::vector<int> mcs_elimination_order(const SparsityGraph& g) {
  const int n = g.n_nodes();
  std::vector<int> weight(static_cast<std::size_t>(n), 0);
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<int> visit;
  visit.reserve(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    }
    visited[best] = 1;
    visit.push_back(best);
    for (int u : g.neighbors(best)) {
      if (!visited[u]) ++weight[u];
    }
  }
  std::reverse(visit.begin(), visit.end());
  return visit;
}

bool is_perfect_elimination_order(const SparsityGraph& g,
                                  std::span<const int> order) {
  const auto pos = positions(order, g.n_nodes());
  for (int v : order) {
    const auto h = higher_neighbors(g, pos, v);
    if (h.size() < 2) continue;
    const int parent = h.front();
    for (std::size_t k = 1; k < h.size(); ++k) {
      if (!g.has_edge(parent, h[k])) return false;
    }
  }
  return true;
}

ChordalityResult is_chordal(const SparsityGraph& g) {
  auto order = mcs_elimination_order(g);
  if (is_perfect_elimination_order(g, order)) return {true, std::move(order)};
  return {false, {}};
}

SparsityGraph chordal_extension(const SparsityGraph& g,
                                std::span<const int> order) {
  const int n = g.n_nodes();
  const auto pos = positions(order, n);
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) adj[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());
  SparsityGraph out = g;
  for (int v : order) {
    std::vector<int> later;
    for (int u : adj[v]) {
      if (pos[u] > pos[v]) later.push_back(u);
    }
    for (std::size_t a = 0; a < later.size(); ++a) {
      for (std::size_t b = a + 1; b < later.size(); ++b) {
        if (adj[later[a]].insert(later[b]).second) {
          adj[later[b]].insert(later[a]);
          out.add_edge(later[a], later[b]);
        }
      }
    }
  }
  return out;
}

SparsityGraph chordal_extension(const SparsityGraph& g) {
  const auto order = mcs_elimination_order(g);
  return chordal_extension(g, order);
}

CliqueSet maximal_cliques(const SparsityGraph& g, std::span<const int> order) {
  const int n = g.n_nodes();
  const auto pos = positions(order, n);
  if (!is_perfect_elimination_order(g, order)) {
    throw ContractViolation(
        "maximal_cliques requires a perfect elimination order of a chordal "
        "graph");
  }
  std::vector<std::vector<int>> higher(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) higher[v] = higher_neighbors(g, pos, v);

  // C_v = {v} + higher(v) fails to be maximal iff some u with parent(u) = v
  // has |higher(u)| = |higher(v)| + 1 (then C_v is a subset of C_u).
  std::vector<char> dominated(static_cast<std::size_t>(n), 0);
  for (int u = 0; u < n; ++u) {
    if (higher[u].empty()) continue;
    const int parent = higher[u].front();
    if (higher[u].size() == higher[parent].size() + 1) dominated[parent] = 1;
  }
  CliqueSet cs;
  cs.elimination_order.assign(order.begin(), order.end());
  for (int v : order) {
    if (dominated[v]) continue;
    std::vector<int> c = higher[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    cs.cliques.push_back(std::move(c));
  }
  return cs;
}

SparsityGraph clique_graph(int n_nodes,
                           std::span<const std::vector<int>> cliques) {
  SparsityGraph g(n_nodes);
  for (const auto& c : cliques) {
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        if (c[a] != c[b]) g.add_edge(c[a], c[b]);
      }
    }
  }
  return g;
}

}  // namespace arrowsdp
