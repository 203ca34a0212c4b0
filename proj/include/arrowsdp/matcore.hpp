#pragma once

// Sparse symmetric matrices, sparsity graphs, chordality and clique
// machinery, and PSD certification.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arrowsdp/errors.hpp"

namespace arrowsdp {

/// One stored element of a symmetric matrix. After canonicalization
/// `row <= col`; the element also stands for its mirror (col, row).
struct Entry {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse symmetric matrix in coordinate storage (upper triangle).
///
/// Entries are kept sorted by (row, col), free of duplicates and of
/// explicit zeros, so the stored pattern is exactly the structural pattern.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int n);

  /// Builds a matrix from coordinate entries. Each entry (i, j, v) places v
  /// at (i, j) and (j, i); entries addressing the same canonical position
  /// are summed. Throws DomainError on out-of-range indices or non-finite
  /// values.
  static SymMat from_entries(int n, std::span<const Entry> entries);
  static SymMat from_dense(const Eigen::MatrixXd& dense, double zero_tol = 0.0);
  static SymMat identity(int n);

  int dim() const noexcept { return n_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double operator()(int i, int j) const;

  Eigen::MatrixXd to_dense() const;
  /// Full (both triangles) compressed-column representation.
  Eigen::SparseMatrix<double> to_sparse() const;

  /// max_i sum_j |a_ij|
  double norm_inf() const;
  double max_abs() const;

  /// Sorted indices of rows holding at least one stored entry.
  std::vector<int> support() const;

  SymMat scaled(double factor) const;

  friend SymMat operator+(const SymMat& a, const SymMat& b);
  friend SymMat operator-(const SymMat& a, const SymMat& b);
  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  int n_ = 0;
  std::vector<Entry> entries_;
};

/// Principal submatrix on `index` (sorted ascending internally).
SymMat restrict(const SymMat& a, std::span<const int> index);

/// Inverse of restrict: places `local` (|index| x |index|) at rows/columns
/// `index` of an n x n matrix. `index` need not be sorted.
SymMat embed(const SymMat& local, std::span<const int> index, int n);

/// Undirected simple graph on nodes 0..n-1.
class SparsityGraph {
 public:
  SparsityGraph() = default;
  explicit SparsityGraph(int n_nodes);
  static SparsityGraph from_edges(int n_nodes,
                                  std::span<const std::pair<int, int>> edges);
  static SparsityGraph complete(int n_nodes);

  int n_nodes() const noexcept { return static_cast<int>(adj_.size()); }
  std::size_t n_edges() const noexcept;

  void add_edge(int i, int j);
  bool has_edge(int i, int j) const;
  const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
  /// Edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  bool is_subgraph_of(const SparsityGraph& other) const;

  friend bool operator==(const SparsityGraph&, const SparsityGraph&) = default;

 private:
  std::vector<std::vector<int>> adj_;  // sorted, no self loops
};

/// Edge (i, j) iff i != j and |a_ij| > zero_tol.
SparsityGraph sparsity_graph(const SymMat& a, double zero_tol = 0.0);

/// Elimination order obtained by reversing a maximum cardinality search.
/// Ties are broken towards the smallest node index.
std::vector<int> mcs_elimination_order(const SparsityGraph& g);

bool is_perfect_elimination_order(const SparsityGraph& g,
                                  std::span<const int> order);

struct ChordalityResult {
  bool chordal = false;
  /// Perfect elimination order when `chordal`, empty otherwise.
  std::vector<int> elimination_order;
};

ChordalityResult is_chordal(const SparsityGraph& g);

/// G plus the fill edges of symbolic elimination in `order`.
SparsityGraph chordal_extension(const SparsityGraph& g,
                                std::span<const int> order);
/// Same with the reverse-MCS order of g.
SparsityGraph chordal_extension(const SparsityGraph& g);

struct CliqueSet {
  std::vector<std::vector<int>> cliques;  // each sorted ascending
  std::vector<int> elimination_order;
};

/// All maximal cliques of a chordal graph, given a perfect elimination
/// order. Throws ContractViolation if `order` is not one.
CliqueSet maximal_cliques(const SparsityGraph& g, std::span<const int> order);

/// Graph whose edge set is the union of the complete graphs on `cliques`.
SparsityGraph clique_graph(int n_nodes,
                           std::span<const std::vector<int>> cliques);

/// True iff lambda_min(a) >= -tol * max(1, ||a||_inf). Throws DomainError on
/// non-finite entries.
bool is_psd(const SymMat& a, double tol = 1e-9);
bool is_psd(const Eigen::MatrixXd& a, double tol = 1e-9);

/// Smallest eigenvalue of the dense matrix restricted to the rows that carry
/// entries (0 for an empty matrix). Used by verification reports.
double min_eigenvalue(const SymMat& a);

// Matrix Market (coordinate real symmetric) and edge-list text formats.
void write_matrix_market(std::ostream& out, const SymMat& a);
SymMat read_matrix_market(std::istream& in);
void write_matrix_market(const std::string& path, const SymMat& a);
SymMat read_matrix_market(const std::string& path);

void write_edge_list(std::ostream& out, const SparsityGraph& g);
SparsityGraph read_edge_list(std::istream& in);

}  // namespace arrowsdp
