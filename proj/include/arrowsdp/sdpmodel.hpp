#pragma once

// Linear SDP representation and the builders for the minimum-compliance
// problem in original, chordal, arrow and fictitious-load form.

#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "arrowsdp/fem2d.hpp"
#include "arrowsdp/matcore.hpp"

namespace arrowsdp::sdp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Variable families used for bookkeeping: design densities, objective
/// epigraph scalars (gamma, gamma_k, s_k), interface vectors (g, sigma) and
/// interface matrices (S).
enum class Family { x, gamma, s, g, sigma, S, other };

std::string to_string(Family f);
Family parse_family(const std::string& text);

struct Variable {
  std::string name;
  Family family = Family::other;
  double lower = -kInf;
  double upper = kInf;
};

enum class Relation { le, eq, ge };

struct LinearConstraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  Relation relation = Relation::le;
  double rhs = 0.0;
};

/// F(y) = constant + sum_j y_j * coefficient_j. A diagonal block stands for
/// independent scalar constraints F(y)_rr >= 0.
struct AffineBlock {
  std::string name;
  int dim = 0;
  bool diagonal = false;
  SymMat constant;
  std::vector<std::pair<int, SymMat>> terms;  ///< sorted by variable index
  /// Row of the monolithic matrix Z that each local row stands for; empty
  /// when the block has no such correspondence.
  std::vector<int> embedding;
};

struct SdoProblem {
  std::string form;  ///< original, chordal, arrow, fictitious, conic, ...
  int p = 1;         ///< number of subdomains
  std::vector<Variable> vars;
  std::vector<double> objective;  ///< minimized
  std::vector<AffineBlock> blocks;
  std::vector<LinearConstraint> linear;

  int n_vars() const { return static_cast<int>(vars.size()); }
  int add_variable(std::string name, Family family, double lower = -kInf,
                   double upper = kInf, double cost = 0.0);

  /// Checks symmetric, in-range coefficients, consistent sizes, that every
  /// variable is used and the objective length. Throws DomainError.
  void validate() const;

  SymMat evaluate(int block, std::span<const double> y) const;
  double objective_value(std::span<const double> y) const;
};

/// Bounds become two diagonal blocks ("lower": y - lo >= 0, "upper":
/// hi - y >= 0) and the linear constraints one diagonal block ("linear",
/// equalities as a >=/<= row pair). The result has no bounds or rows.
SdoProblem to_conic(const SdoProblem& problem);

/// Interface-variable selection at points where four subdomains meet. With
/// `single_diagonal` only the (top-left, bottom-right) pair of each cross
/// point receives variables; `both_diagonals` creates them for every
/// nonempty intersection.
enum class CrossPoints { single_diagonal, both_diagonals };

struct BuildOptions {
  CrossPoints cross_points = CrossPoints::single_diagonal;
  /// Chordal form only: also create matrix variables S_{k,l} on diagonal
  /// (corner-sharing) pairs. When false their entries are carried by the
  /// edge-sharing pairs through the same cross point and only sigma_{k,l} is
  /// created there.
  bool corner_matrices = false;
};

/// Intersections that receive interface variables.
std::vector<decomp::PairKey> active_pairs(const fem2d::SubdomainPlan& plan,
                                          BuildOptions opts = {});

/// min gamma s.t. [[K(x), f], [f^T, gamma]] >= 0, sum x <= V, bounds.
SdoProblem build_original(const fem2d::FemModel& model);

/// Per subdomain [[K^(k)(x) + S^(k), f^(k) + sigma^(k)], [., s_k]] >= 0 with
/// S_{k,l} (upper triangle scalars) and sigma_{k,l} on active intersections;
/// min sum s_k.
SdoProblem build_chordal(const fem2d::FemModel& model,
                         const fem2d::SubdomainPlan& plan, BuildOptions opts = {});

/// Per subdomain [[K^(k)(x), f^(k) + g^(k)], [., gamma_k]] >= 0 with vectors
/// g_{k,l} on active intersections; min sum gamma_k.
SdoProblem build_arrow(const fem2d::FemModel& model,
                       const fem2d::SubdomainPlan& plan, BuildOptions opts = {});

/// Two-subdomain fictitious-load form: [[gamma_i, (f^(i) +/- g)^T],
/// [f^(i) +/- g, K^(i)(x)]] on I_i with g on the interface.
SdoProblem build_fictitious(const fem2d::FemModel& model,
                            const fem2d::SubdomainPlan& plan);

struct CountReport {
  std::string form;
  int p = 1;
  int n_vars = 0;
  std::vector<int> block_sizes;  ///< PSD blocks only
  int n_blocks = 0;
  int max_block = 0;
  std::map<std::string, int> breakdown;  ///< x, gamma, vector, matrix
};

CountReport count_report(const SdoProblem& problem);
std::string count_csv_header();
std::string count_csv_row(const CountReport& report);

/// Largest coefficient mismatch between the sum of the embedded blocks of a
/// decomposed problem and the monolithic block of `original`, comparing the
/// constant, every x_i, the epigraph scalars (gamma_k or s_k against gamma)
/// and the interface variables (against zero).
double sum_identity_defect(const SdoProblem& decomposed, const SdoProblem& original);

/// Feasible point of an arrow problem from a displacement u with K(x)u = f:
/// f^(k) + g^(k) = K^(k)(x) u and gamma_k = u^T K^(k)(x) u.
std::vector<double> arrow_completion(const fem2d::FemModel& model,
                                     const fem2d::SubdomainPlan& plan,
                                     const SdoProblem& arrow,
                                     std::span<const double> x,
                                     const Eigen::VectorXd& u);

struct SdpaOptions {
  /// Writes '*%' comment lines with names and block kinds so that import
  /// restores them.
  bool metadata = true;
};

/// SDPA sparse format of to_conic(problem): F0 = -constant, F_j = coefficient
/// of y_j, upper triangle entries, 1-based, diagonal blocks with negative
/// size.
void export_sdpa(std::ostream& out, const SdoProblem& problem, SdpaOptions opts = {});
void export_sdpa(const std::string& path, const SdoProblem& problem,
                 SdpaOptions opts = {});
/// Returns a conic problem (no bounds, no linear rows).
SdoProblem import_sdpa(std::istream& in);
SdoProblem import_sdpa(const std::string& path);

}  // namespace arrowsdp::sdp
