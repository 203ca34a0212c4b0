#pragma once

// Front-end operations behind the arrowsdp executable: problem generation,
// decomposition of serialized arrow systems, solving, randomized
// verification and benchmarking.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arrowsdp/ipsolver.hpp"

namespace arrowsdp::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Raised for invalid command-line input; mapped to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// original, chordal, arrow or fictitious.
sdp::SdoProblem build_form(const fem2d::FemModel& model, const std::string& form, int nx_sub,
                           int ny_sub, sdp::BuildOptions opts = {});

struct GenOptions {
  fem2d::FemConfig config;
  std::string form = "original";
  int nx_sub = 1;
  int ny_sub = 1;
  sdp::BuildOptions build;
  /// Output prefix: <out>.dat-s and <out>.counts.csv. Nothing is written
  /// when empty.
  std::string out;
};

/// Builds the problem, writes the SDPA file and the count CSV, prints
/// "<n> vars, block <b>" and the block breakdown. Plan divisibility errors
/// surface as UsageError.
sdp::CountReport cmd_gen(const GenOptions& opts, std::ostream& out);

/// Reads an arrow system, decomposes it, verifies the split and writes the
/// blocks as Matrix Market files into `out_dir` when it is not empty.
/// Returns exit_ok or exit_failure.
int cmd_decompose(const std::string& input, const std::string& out_dir, std::ostream& out);

struct SolveCommand {
  /// SDPA input; when empty the problem is generated from `gen`.
  std::string sdpa;
  GenOptions gen;
  ipm::SolveOptions solve;
  std::string csv;  ///< report CSV, optional
  bool verbose = false;
};

/// Returns exit_ok when the solver reports optimal or near_optimal.
int cmd_solve(const SolveCommand& cmd, std::ostream& out);

// Randomized instances shared by the verification suites.

/// Interval index sets on [0, n) with strictly increasing starts and ends,
/// so no set contains another; every nonempty intersection has more than m
/// elements. A_k = G_k^T G_k + eps I on I_k, B_k random on I_k and
/// C = B^T A^{-1} B + I, so M is PSD.
decomp::ArrowSystem random_arrow_system(std::mt19937_64& rng, int max_n = 30, int max_p = 4,
                                        int max_m = 2);

/// Random PSD matrix (n <= max_n) whose pattern lies in a random chordal
/// graph, together with the maximal cliques of that graph. Roughly a third
/// of the instances are rank deficient.
std::pair<SymMat, CliqueSet> random_chordal_instance(std::mt19937_64& rng, int max_n = 20);

/// Chain of overlapping intervals and summands Q_k supported on them whose
/// sum is PSD while the individual Q_k are generally indefinite.
std::pair<std::vector<SymMat>, decomp::Partition> random_embedded_instance(
    std::mt19937_64& rng, int max_n = 20, int max_p = 4);

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::string first_failure;  ///< invariant name and detail of the first failing trial

  bool passed() const { return failures == 0; }
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int trials = 200;
  /// Perturbs one entry of one block of every arrow split before checking
  /// ("sum"), or flips the sign of its smallest eigenvalue ("psd").
  std::string corrupt;
};

/// Arrow, chordal and embedded decomposition suites plus the sdpmodel
/// structural identities. Prints one line per suite.
std::vector<SuiteResult> cmd_verify(const VerifyOptions& opts, std::ostream& out);

struct BenchRow {
  std::string form;
  int nx = 0, ny = 0;
  int nx_sub = 1, ny_sub = 1;
  int n_vars = 0;
  int max_block = 0;
  int iterations = 0;
  double total_time = 0.0;
  double per_iter_time = 0.0;
  double speedup_total = 0.0;
  double speedup_per_iter = 0.0;
  double opt_status_metric = 0.0;
  double objective = 0.0;
  std::string status;
  bool skipped = false;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

struct ComplexityFit {
  double c = 0.0;
  double q = 0.0;
  double r2 = 0.0;
  int rows = 0;
};

/// Least-squares fit of log t = log c + q log size. Throws DomainError for
/// fewer than two points or non-positive values.
ComplexityFit fit_complexity(std::span<const std::pair<double, double>> size_time);

struct BenchOptions {
  std::vector<std::pair<int, int>> meshes{{8, 4}, {12, 6}, {16, 8}, {20, 10}, {24, 12}};
  std::vector<std::string> forms{"original", "arrow"};
  /// Subdomain grids; empty means subdomains of `sub_elems` x `sub_elems`
  /// elements. The fictitious form always uses a 2 x 1 grid.
  std::vector<std::pair<int, int>> plans;
  int sub_elems = 2;
  /// Solves running longer than this are marked skipped (0 = no limit).
  double time_budget = 0.0;
  ipm::SolveOptions solve;
  std::string csv;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::map<std::string, ComplexityFit> fits;  ///< per form, over non-skipped rows
};

BenchResult cmd_bench(const BenchOptions& opts, std::ostream& out);

}  // namespace arrowsdp::cli
