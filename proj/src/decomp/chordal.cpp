#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "arrowsdp/decomp.hpp"

namespace arrowsdp::decomp {

namespace {

bool contains_all(const IndexSet& sorted_set, const std::vector<int>& items) {
  return std::all_of(items.begin(), items.end(), [&](int v) {
    return std::binary_search(sorted_set.begin(), sorted_set.end(), v);
  });
}

SymMat dense_to_sym(const Eigen::MatrixXd& d, int n) {
  std::vector<Entry> e;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      if (d(i, j) != 0.0) e.push_back({i, j, d(i, j)});
    }
  }
  return SymMat::from_entries(n, e);
}

}  // namespace

ChordalSplit chordal_decompose(const SymMat& a, const CliqueSet& cliques,
                               double tol) {
  const int n = a.dim();
  std::vector<IndexSet> cl = cliques.cliques;
  for (auto& c : cl) {
    std::sort(c.begin(), c.end());
    if (!c.empty() && (c.front() < 0 || c.back() >= n)) {
      throw DomainError("clique index out of range");
    }
  }
  const SparsityGraph g = clique_graph(n, cl);
  if (!sparsity_graph(a).is_subgraph_of(g)) {
    throw DomainError("sparsity pattern is not covered by the cliques");
  }
  std::vector<int> order = cliques.elimination_order;
  if (static_cast<int>(order.size()) != n ||
      !is_perfect_elimination_order(g, order)) {
    auto chk = is_chordal(g);
    if (!chk.chordal) throw DomainError("cliques do not generate a chordal graph");
    order = std::move(chk.elimination_order);
  }
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pos[order[k]] = k;

  // Cliques containing each vertex, in clique order.
  std::vector<std::vector<int>> owners(static_cast<std::size_t>(n));
  for (int k = 0; k < static_cast<int>(cl.size()); ++k) {
    for (int v : cl[k]) owners[v].push_back(k);
  }

  const double scale = std::max(1.0, a.norm_inf());
  const double abs_tol = tol * scale;
  Eigen::MatrixXd work = a.to_dense();
  std::vector<Eigen::MatrixXd> parts(cl.size(), Eigen::MatrixXd::Zero(n, n));

  for (int v : order) {
    std::vector<int> higher;
    for (int u : g.neighbors(v)) {
      if (pos[u] > pos[v]) higher.push_back(u);
    }
    std::vector<int> needed = higher;
    needed.push_back(v);
    int target = -1;
    for (int k : owners[v]) {
      if (contains_all(cl[k], needed)) {
        target = k;
        break;
      }
    }
    if (target < 0) {
      if (owners[v].empty() && higher.empty()) {
        if (std::abs(work(v, v)) > abs_tol) {
          throw DomainError("vertex " + std::to_string(v) +
                            " carries a diagonal entry but lies in no clique");
        }
        continue;
      }
      throw DomainError("no clique contains vertex " + std::to_string(v) +
                        " and its higher neighbourhood");
    }
    const double pivot = work(v, v);
    if (pivot < -abs_tol) {
      throw InfeasibleDecomposition("matrix is not PSD (negative pivot " +
                                    std::to_string(pivot) + " at vertex " +
                                    std::to_string(v) + ")");
    }
    auto& y = parts[target];
    y(v, v) += pivot;
    double bmax = 0.0;
    for (int u : higher) {
      y(u, v) += work(u, v);
      y(v, u) += work(u, v);
      bmax = std::max(bmax, std::abs(work(u, v)));
    }
    if (pivot <= abs_tol) {
      // A PSD matrix with a (numerically) zero pivot has a zero column.
      if (bmax > std::sqrt(abs_tol * scale)) {
        throw InfeasibleDecomposition(
            "matrix is not PSD (zero pivot with nonzero column at vertex " +
            std::to_string(v) + ")");
      }
      continue;
    }
    for (int r : higher) {
      for (int c : higher) {
        const double upd = work(r, v) * work(c, v) / pivot;
        y(r, c) += upd;
        work(r, c) -= upd;
      }
    }
  }

  ChordalSplit out;
  out.summands.reserve(cl.size());
  for (std::size_t k = 0; k < cl.size(); ++k) {
    out.summands.emplace_back(cl[k], dense_to_sym(parts[k], n));
  }
  return out;
}

EmbeddedSplit embedded_decompose(std::span<const SymMat> q,
                                 const Partition& partition, double tol) {
  const int p = partition.size();
  const int n = partition.n;
  if (static_cast<int>(q.size()) != p) {
    throw DomainError("number of summands differs from the number of sets");
  }
  partition.require_assumptions();
  for (int k = 0; k < p; ++k) {
    if (q[k].dim() != n) throw DomainError("summand dimension mismatch");
    for (const auto& e : q[k].entries()) {
      const auto& s = partition.sets[k];
      if (!std::binary_search(s.begin(), s.end(), e.row) ||
          !std::binary_search(s.begin(), s.end(), e.col)) {
        throw DomainError("summand " + std::to_string(k) +
                          " is not supported on its index set");
      }
    }
  }

  const SparsityGraph ext = clique_graph(n, partition.sets);
  const auto chk = is_chordal(ext);
  if (!chk.chordal) {
    throw PreconditionError("Assumption 4",
                            "union of completed subgraphs is not chordal");
  }
  {
    auto mc = maximal_cliques(ext, chk.elimination_order).cliques;
    auto sets = partition.sets;
    std::sort(mc.begin(), mc.end());
    std::sort(sets.begin(), sets.end());
    if (mc != sets) {
      throw PreconditionError(
          "Assumption 4",
          "maximal cliques of the chordal extension differ from the index sets");
    }
  }

  SymMat total(n);
  for (const auto& qk : q) total = total + qk;
  const auto split =
      chordal_decompose(total, CliqueSet{partition.sets, chk.elimination_order}, tol);

  const double scale = std::max(1.0, total.norm_inf());
  std::map<PairKey, std::vector<Entry>> s_entries;
  for (int k = 0; k < p; ++k) {
    // R = Y_k - Q_k + sum_{l<k} S_{l,k} must equal sum_{l>k} S_{k,l}.
    SymMat r = split.summands[k].second - q[k];
    for (int l = 0; l < k; ++l) {
      auto it = s_entries.find({l, k});
      if (it != s_entries.end()) r = r + SymMat::from_entries(n, it->second);
    }
    for (const auto& e : r.entries()) {
      int target = -1;
      for (int l = k + 1; l < p && target < 0; ++l) {
        const IndexSet* inter = partition.intersection(k, l);
        if (inter && std::binary_search(inter->begin(), inter->end(), e.row) &&
            std::binary_search(inter->begin(), inter->end(), e.col)) {
          target = l;
        }
      }
      if (target < 0) {
        if (std::abs(e.value) > 1e3 * tol * scale) {
          throw ContractViolation(
              "sequential S solve left a residual outside later intersections");
        }
        continue;
      }
      s_entries[{k, target}].push_back(e);
    }
  }

  EmbeddedSplit out;
  for (const auto& [key, ents] : s_entries) {
    out.s.emplace(key, SymMat::from_entries(n, ents));
  }
  for (int k = 0; k < p; ++k) {
    SymMat b = q[k];
    for (const auto& [key, s] : out.s) {
      if (key.second == k) b = b - s;
      if (key.first == k) b = b + s;
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

}  // namespace arrowsdp::decomp
