#pragma once

// Primal-dual interior-point method for SdoProblem.
//
// The problem is solved in conic form: minimize c^T y subject to
// S_b = F_b(y) >= 0 for every block (diagonal blocks are scalar rows). The
// dual variables are X_b >= 0 with sum_b <A_j^b, X_b> = c_j.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "arrowsdp/sdpmodel.hpp"

namespace arrowsdp::ipm {

struct SolveOptions {
  double rel_gap_tol = 1e-9;
  double feas_tol = 1e-8;
  int max_iters = 200;
  double step_fraction = 0.98;
  /// Wall-clock limit in seconds; 0 disables it. Exceeding it ends the solve
  /// with status max_iters.
  double time_limit = 0.0;
  /// Writes one line per iteration to this stream when set.
  std::ostream* log = nullptr;

  void validate() const;
};

enum class Status { optimal, near_optimal, max_iters, infeasible, numerical_failure };

std::string to_string(Status s);

struct IterationLog {
  int iter = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct SolveReport {
  Status status = Status::numerical_failure;
  double objective = 0.0;   ///< primal objective c^T y
  double dual_objective = 0.0;
  std::vector<double> x;    ///< variable values y
  /// Dual variables per block of to_conic(problem): a dim x dim matrix for a
  /// PSD block, a dim x 1 column for a diagonal block.
  std::vector<Eigen::MatrixXd> dual;
  /// Per conic block, an orthonormal basis V of a subspace on which every
  /// feasible F_b vanishes (no columns when there is none). Such blocks are
  /// solved on a complement of V; their dual is PSD on the complement only.
  std::vector<Eigen::MatrixXd> face;
  int iterations = 0;
  double final_gap = 0.0;   ///< relative duality gap
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double per_iter_time = 0.0;
  double total_time = 0.0;
  double opt_status_metric = 0.0;  ///< primal / dual objective
  std::vector<IterationLog> history;
  std::string message;
};

SolveReport solve(const sdp::SdoProblem& problem, const SolveOptions& opts = {});

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
};

/// Relative residuals of a candidate pair:
///   primal: largest violation of F_b(y) >= 0 over 1 + max ||F_b constant||,
///   dual: ||c - A^*(X)|| / (1 + ||c||) plus the largest negative eigenvalue
///         of X over 1 + max ||X_b||,
///   complementarity: |sum <X_b, F_b(y)>| / (1 + |c^T y| + |dual objective|).
/// `dual` follows the layout of SolveReport::dual. With `face` (layout of
/// SolveReport::face) the eigenvalue test of X_b is taken on the orthogonal
/// complement of face[b]. Throws DomainError on shape mismatch.
KktResiduals kkt_residuals(const sdp::SdoProblem& problem, std::span<const double> y,
                           std::span<const Eigen::MatrixXd> dual,
                           std::span<const Eigen::MatrixXd> face = {});
/// Same with the primal point, dual and faces of a report.
KktResiduals kkt_residuals(const sdp::SdoProblem& problem, const SolveReport& report);

std::string report_csv_header();
std::string report_csv_row(const SolveReport& r);
void write_log(std::ostream& out, const SolveReport& r);

}  // namespace arrowsdp::ipm
