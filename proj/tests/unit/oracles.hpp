#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the library.

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using AdjMatrix = std::vector<std::vector<bool>>;

/// Closed-form stiffness of a unit-square bilinear plane-stress element,
/// counter-clockwise nodes from the lower-left corner, dofs (ux, uy).
inline Eigen::Matrix<double, 8, 8> unit_square_ke(double e, double nu) {
  const double k[8] = {0.5 - nu / 6,  0.125 + nu / 8, -0.25 - nu / 12, -0.125 + 3 * nu / 8,
                       -0.25 + nu / 12, -0.125 - nu / 8, nu / 6,         0.125 - 3 * nu / 8};
  const int idx[8][8] = {{0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2},
                         {2, 7, 0, 5, 6, 3, 4, 1}, {3, 6, 5, 0, 7, 2, 1, 4},
                         {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
                         {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
  Eigen::Matrix<double, 8, 8> ke;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) ke(i, j) = e / (1 - nu * nu) * k[idx[i][j]];
  }
  return ke;
}

/// Free dof of (ix, iy, dir) on an nx x ny mesh clamped on the left edge,
/// -1 when fixed.
inline int clamped_left_dof(int ny, int ix, int iy, int dir) {
  if (ix == 0) return -1;
  return 2 * ((ix - 1) * (ny + 1) + iy) + dir;
}

/// Dense K(x) for the left-clamped mesh, assembled element by element.
inline Eigen::MatrixXd dense_stiffness(int nx, int ny, const std::vector<double>& x,
                                       double e = 1.0, double nu = 0.3) {
  const int n = 2 * nx * (ny + 1);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  const auto ke = unit_square_ke(e, nu);
  for (int ex = 0; ex < nx; ++ex) {
    for (int ey = 0; ey < ny; ++ey) {
      const int corner[4][2] = {{ex, ey}, {ex + 1, ey}, {ex + 1, ey + 1}, {ex, ey + 1}};
      int dof[8];
      for (int a = 0; a < 4; ++a) {
        for (int d = 0; d < 2; ++d) dof[2 * a + d] = clamped_left_dof(ny, corner[a][0], corner[a][1], d);
      }
      const double xe = x[static_cast<std::size_t>(ex * ny + ey)];
      for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
          if (dof[a] >= 0 && dof[b] >= 0) k(dof[a], dof[b]) += xe * ke(a, b);
        }
      }
    }
  }
  return k;
}

/// Every later neighbour set of each vertex is a clique.
inline bool is_peo(const AdjMatrix& g, const std::vector<int>& order) {
  const int n = static_cast<int>(g.size());
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  for (int v = 0; v < n; ++v) {
    std::vector<int> later;
    for (int w = 0; w < n; ++w) {
      if (g[v][w] && pos[w] > pos[v]) later.push_back(w);
    }
    for (std::size_t a = 0; a < later.size(); ++a) {
      for (std::size_t b = a + 1; b < later.size(); ++b) {
        if (!g[later[a]][later[b]]) return false;
      }
    }
  }
  return true;
}

/// Chordality by trying every ordering (small graphs only).
inline bool chordal_by_permutations(const AdjMatrix& g) {
  std::vector<int> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  do {
    if (is_peo(g, order)) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

/// Number of fill edges produced by eliminating in `order`.
inline int fill_count(AdjMatrix g, const std::vector<int>& order) {
  const int n = static_cast<int>(g.size());
  std::vector<bool> gone(n, false);
  int fill = 0;
  for (int v : order) {
    std::vector<int> nb;
    for (int w = 0; w < n; ++w) {
      if (g[v][w] && !gone[w]) nb.push_back(w);
    }
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!g[nb[a]][nb[b]]) {
          g[nb[a]][nb[b]] = g[nb[b]][nb[a]] = true;
          ++fill;
        }
      }
    }
    gone[v] = true;
  }
  return fill;
}

inline int minimum_fill(const AdjMatrix& g) {
  std::vector<int> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  int best = 1 << 30;
  do {
    best = std::min(best, fill_count(g, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// All maximal cliques by subset enumeration (n <= ~12).
inline std::set<std::vector<int>> maximal_cliques(const AdjMatrix& g) {
  const int n = static_cast<int>(g.size());
  std::vector<unsigned> cliques;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      if (!(mask >> a & 1u)) continue;
      for (int b = a + 1; b < n && ok; ++b) {
        if ((mask >> b & 1u) && !g[a][b]) ok = false;
      }
    }
    if (ok) cliques.push_back(mask);
  }
  std::set<std::vector<int>> out;
  for (unsigned c : cliques) {
    bool maximal = true;
    for (unsigned d : cliques) {
      if (d != c && (d & c) == c) {
        maximal = false;
        break;
      }
    }
    if (!maximal) continue;
    std::vector<int> members;
    for (int a = 0; a < n; ++a) {
      if (c >> a & 1u) members.push_back(a);
    }
    out.insert(members);
  }
  return out;
}

/// PSD iff every principal minor is non-negative.
inline bool psd_by_minors(const Eigen::MatrixXd& a, double tol = 1e-12) {
  const int n = static_cast<int>(a.rows());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) idx.push_back(i);
    }
    Eigen::MatrixXd sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = a(idx[r], idx[c]);
    }
    if (sub.determinant() < -tol) return false;
  }
  return true;
}

inline AdjMatrix random_graph(std::mt19937_64& rng, int n, double density) {
  std::bernoulli_distribution edge(density);
  AdjMatrix g(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (edge(rng)) g[a][b] = g[b][a] = true;
    }
  }
  return g;
}

/// Ascending eigenvalues of a dense symmetric matrix.
inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace oracle
