#pragma once

// Chordal, embedded-chordal and arrow decompositions of PSD matrices, and
// the checks used to certify them.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arrowsdp/matcore.hpp"

namespace arrowsdp::decomp {

using IndexSet = std::vector<int>;
/// (k, l) with k < l, 0-based subdomain indices.
using PairKey = std::pair<int, int>;

/// Overlapping cover of [0, n) by index sets, with the nonempty pairwise
/// intersections precomputed.
struct Partition {
  int n = 0;
  std::vector<IndexSet> sets;
  std::map<PairKey, IndexSet> pairs;

  /// Sorts the sets, checks range and cover, computes the intersections.
  static Partition from_sets(int n, std::vector<IndexSet> sets);

  int size() const noexcept { return static_cast<int>(sets.size()); }
  const IndexSet* intersection(int k, int l) const;
  int neighbor_count(int k) const;

  /// Human-readable list of violated assumptions (empty when all hold).
  /// Assumption 3 is read as "no set meets more than `max_neighbors` others".
  std::vector<std::string> assumption_violations(int max_neighbors = 8) const;
  /// Throws PreconditionError naming the first violated assumption among
  /// Assumptions 1-3.
  void require_assumptions(int max_neighbors = 8) const;
};

/// Clique split: summand k is supported on clique k.
struct ChordalSplit {
  std::vector<std::pair<IndexSet, SymMat>> summands;
};

/// Splits a PSD matrix whose pattern lies in the chordal graph generated by
/// `cliques` into PSD summands supported on the cliques. Vertices are
/// eliminated in a perfect elimination order; the rank-one piece removed at
/// each step is credited to the first clique containing the vertex and its
/// higher neighbourhood.
///
/// Throws DomainError when the pattern is not covered or the cliques do not
/// generate a chordal graph, InfeasibleDecomposition when A is not PSD.
ChordalSplit chordal_decompose(const SymMat& a, const CliqueSet& cliques,
                               double tol = 1e-9);

struct EmbeddedSplit {
  /// S_{k,l} for nonempty intersections; each is n x n supported on I_{k,l}.
  std::map<PairKey, SymMat> s;
  /// Q~_k = Q_k - sum_{l<k} S_{l,k} + sum_{l>k} S_{k,l}
  std::vector<SymMat> blocks;

  SymMat s_at(int k, int l, int n) const;
};

/// Embedded chordal decomposition: finds S_{k,l} so that every modified
/// summand Q~_k is PSD. Requires Assumptions 1-4; the sequential solve runs
/// k = 0..p-2 and entries shared by several intersections go to the pair with
/// the smallest l.
EmbeddedSplit embedded_decompose(std::span<const SymMat> q,
                                 const Partition& partition,
                                 double tol = 1e-9);

struct ArrowPart {
  SymMat a;           ///< n x n, supported on I_k x I_k
  Eigen::MatrixXd b;  ///< n x m, rows outside I_k are zero
};

/// M = sum_k [[A_k, B_k], [B_k^T, 0]] + [[0, 0], [0, C]]
struct ArrowSystem {
  int n = 0;
  int m = 0;
  std::vector<ArrowPart> parts;
  SymMat c;
  Partition partition;

  /// Shapes, supports and the width bound m < min |I_{k,l}|. Throws
  /// DomainError.
  void validate() const;

  SymMat shaft() const;              ///< A = sum A_k
  Eigen::MatrixXd coupling() const;  ///< B = sum B_k
  SymMat part_matrix(int k) const;   ///< M_k, (n+m) x (n+m)
  SymMat assemble() const;           ///< M
};

struct ArrowSplit {
  Eigen::MatrixXd x;                         ///< A^{-1} B
  std::map<PairKey, Eigen::MatrixXd> d;      ///< n x m, rows on I_{k,l}
  std::vector<Eigen::MatrixXd> c_parts;      ///< C_k, m x m
  std::vector<SymMat> blocks;                ///< M~_k, (n+m) x (n+m)
};

/// Arrow decomposition through X = A^{-1} B and the sequential solve for
/// D_{k,l}; C_k = X^T A_k X for k < p-1 and the remainder goes to the last
/// part. Throws PreconditionError (A_k not PSD, C not PD, Assumptions 1-3),
/// ConditioningError (A singular or inaccurate solve).
ArrowSplit arrow_decompose(const ArrowSystem& sys, double tol = 1e-9);

/// Assembles M~_k from user supplied D_{k,l} and C_k.
std::vector<SymMat> arrow_blocks(const ArrowSystem& sys,
                                 const std::map<PairKey, Eigen::MatrixXd>& d,
                                 std::span<const Eigen::MatrixXd> c_parts);

/// Re-expresses an arrow split as embedded-chordal S matrices on the
/// extended index sets: S_{k,l} = [[0, D_{k,l}], [D_{k,l}^T, E_{k,l}]], where
/// the corner blocks E carry the C_k shares along the smallest-l chain.
std::map<PairKey, SymMat> arrow_to_embedded(const ArrowSystem& sys,
                                            const ArrowSplit& split);

struct VerifyTolerances {
  double sum = 1e-10;  ///< relative to ||original||_inf
  double psd = 1e-8;   ///< relative to ||original||_inf
};

struct SplitReport {
  double max_residual = 0.0;  ///< max |sum blocks - original| entrywise
  double min_eigenvalue = 0.0;
  double scale = 1.0;         ///< ||original||_inf (1 for the zero matrix)
  bool sum_ok = false;
  bool psd_ok = false;
  bool passed = false;
};

SplitReport verify_split(const SymMat& original, std::span<const SymMat> blocks,
                         VerifyTolerances tol = {});

/// Text format for ArrowSystem; the grammar is described in docs/formats.md.
void write_arrow_system(std::ostream& out, const ArrowSystem& sys);
ArrowSystem read_arrow_system(std::istream& in);

}  // namespace arrowsdp::decomp
