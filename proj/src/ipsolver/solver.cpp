#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseQR>
#include <unordered_map>

#include "arrowsdp/ipsolver.hpp"

namespace arrowsdp::ipm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Coefficient of one variable in one block, stored on its support.
struct Term {
  int var = 0;
  std::vector<int> sup;
  MatrixXd a;
};

struct Block {
  int dim = 0;
  MatrixXd c0;
  std::vector<Term> terms;
};

/// Scalar rows s = c0 + A y >= 0 collected from all diagonal blocks.
struct LpPart {
  int rows = 0;
  VectorXd c0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  std::vector<std::pair<int, int>> origin;  ///< (conic block, row)
};

/// Equalities E y + e0 = 0 found by facial reduction: (F(y) V)(row, col) = 0.
struct EqPart {
  struct Origin {
    int block = 0;
    int row = 0;
    int col = 0;
  };
  int rows = 0;
  VectorXd c0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  std::vector<Origin> origin;
  std::vector<int> active;  ///< linearly independent rows used in the Newton system
};

/// A PSD block whose feasible matrices all vanish on span(V). The solver
/// works on the rows `keep`; `pivots` are the removed rows (V[pivots, :] is
/// invertible).
struct Face {
  bool reduced = false;
  int full_dim = 0;
  std::vector<int> keep, pivots;
  MatrixXd v;
};

struct Data {
  int n_vars = 0;
  VectorXd c;
  std::vector<Block> blocks;
  std::vector<int> block_index;  ///< conic block of each PSD block
  LpPart lp;
  EqPart eq;
  std::vector<Face> faces;
  int n_conic_blocks = 0;
  /// Variables whose coefficients are linear combinations of the others';
  /// they stay at zero.
  std::vector<char> fixed;
  int n_fixed = 0;
};

int sign_of(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double tol = 1e-12 * std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) >= -tol) return 1;
  if (ev(ev.size() - 1) <= tol) return -1;
  return 0;
}

/// Basis of the common kernel of the semidefinite coefficients of `b`
/// (n x 0 when there is none).
MatrixXd definite_kernel(const Block& b) {
  const int n = b.dim;
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& t : b.terms) {
    const int sg = sign_of(t.a);
    if (sg == 0) continue;
    for (std::size_t p = 0; p < t.sup.size(); ++p) {
      for (std::size_t q = 0; q < t.sup.size(); ++q) {
        trip.emplace_back(t.sup[p], t.sup[q], sg * t.a(p, q));
      }
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(m);
    if (ldlt.info() == Eigen::Success) {
      const VectorXd dg = ldlt.vectorD();
      if (dg.size() && dg.minCoeff() > 1e-9 * dg.cwiseAbs().maxCoeff()) return MatrixXd(n, 0);
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es{MatrixXd(m)};
  const VectorXd& ev = es.eigenvalues();
  const double lmax = ev.cwiseAbs().maxCoeff();
  int r = 0;
  while (r < n && ev(r) <= 1e-10 * lmax) ++r;
  return es.eigenvectors().leftCols(r);
}

/// Facial reduction: blocks whose feasible values must vanish on a subspace
/// are restricted to a complement, and F(y) V = 0 becomes a set of linear
/// equalities.
void reduce_faces(Data& d) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> e0;
  d.faces.assign(d.blocks.size(), Face{});
  for (std::size_t bi = 0; bi < d.blocks.size(); ++bi) {
    Block& b = d.blocks[bi];
    const int n = b.dim;
    const MatrixXd v = definite_kernel(b);
    const int r = static_cast<int>(v.cols());
    if (r == 0 || r == n) continue;
    bool isotropic = (v.transpose() * b.c0 * v).norm() <= 1e-10 * std::max(1.0, b.c0.norm());
    for (std::size_t k = 0; k < b.terms.size() && isotropic; ++k) {
      const auto& t = b.terms[k];
      MatrixXd vs(t.sup.size(), r);
      for (std::size_t p = 0; p < t.sup.size(); ++p) vs.row(p) = v.row(t.sup[p]);
      isotropic = (vs.transpose() * t.a * vs).norm() <= 1e-10 * t.a.norm();
    }
    if (!isotropic) continue;

    Face& f = d.faces[bi];
    f.reduced = true;
    f.full_dim = n;
    f.v = v;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(v.transpose());
    std::vector<char> pivot(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < r; ++k) pivot[qr.colsPermutation().indices()(k)] = 1;
    std::vector<int> local(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      if (pivot[i]) {
        f.pivots.push_back(i);
      } else {
        local[i] = static_cast<int>(f.keep.size());
        f.keep.push_back(i);
      }
    }

    // Rows of F(y) V that are not identically zero.
    std::map<std::pair<int, int>, int> row_of;
    auto eq_row = [&](int i, int c) {
      auto [pos, added] = row_of.try_emplace({i, c}, d.eq.rows);
      if (added) {
        d.eq.origin.push_back({static_cast<int>(bi), i, c});
        e0.push_back(0.0);
        ++d.eq.rows;
      }
      return pos->second;
    };
    const MatrixXd cv = b.c0 * v;
    const double c0_tol = 1e-11 * b.c0.norm();
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < r; ++c) {
        if (std::abs(cv(i, c)) > c0_tol) e0[eq_row(i, c)] = cv(i, c);
      }
    }
    for (const auto& t : b.terms) {
      MatrixXd vs(t.sup.size(), r);
      for (std::size_t p = 0; p < t.sup.size(); ++p) vs.row(p) = v.row(t.sup[p]);
      const MatrixXd av = t.a * vs;
      const double tol = 1e-11 * t.a.norm();
      for (std::size_t p = 0; p < t.sup.size(); ++p) {
        for (int c = 0; c < r; ++c) {
          if (std::abs(av(p, c)) > tol) trip.emplace_back(eq_row(t.sup[p], c), t.var, av(p, c));
        }
      }
    }

    // Restrict the block to the kept rows.
    Block red;
    red.dim = static_cast<int>(f.keep.size());
    red.c0 = b.c0(f.keep, f.keep);
    for (auto& t : b.terms) {
      std::vector<int> idx, sup;
      for (std::size_t p = 0; p < t.sup.size(); ++p) {
        if (local[t.sup[p]] >= 0) {
          idx.push_back(static_cast<int>(p));
          sup.push_back(local[t.sup[p]]);
        }
      }
      if (idx.empty()) continue;
      MatrixXd a = t.a(idx, idx);
      if (a.isZero(0.0)) continue;
      red.terms.push_back({t.var, std::move(sup), std::move(a)});
    }
    b = std::move(red);
  }
  d.eq.c0 = Eigen::Map<VectorXd>(e0.data(), static_cast<Eigen::Index>(e0.size()));
  d.eq.a.resize(d.eq.rows, d.n_vars);
  d.eq.a.setFromTriplets(trip.begin(), trip.end());
  d.eq.active.clear();
  if (d.eq.rows == 0) return;
  Eigen::SparseMatrix<double> et = d.eq.a.transpose();
  et.makeCompressed();
  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
  double cmax = 0.0;
  for (int j = 0; j < d.eq.rows; ++j) cmax = std::max(cmax, et.col(j).norm());
  qr.setPivotThreshold(1e-9 * std::max(cmax, 1.0));
  qr.compute(et);
  for (Eigen::Index k = 0; k < qr.rank(); ++k) d.eq.active.push_back(qr.colsPermutation().indices()(k));
  std::sort(d.eq.active.begin(), d.eq.active.end());
}

/// Full-size dual matrix of a reduced block from the reduced dual and the
/// multipliers of its equalities. It is PSD on the complement of span(V);
/// adding V G V^T with G large enough makes it PSD without changing any dual
/// equation, but the required G is unbounded near the optimum.
MatrixXd expand_dual(const Face& f, const MatrixXd& xr, const MatrixXd& lambda) {
  const int r = static_cast<int>(f.v.cols());
  const MatrixXd vp = f.v(f.pivots, Eigen::all);
  const MatrixXd bm = vp.partialPivLu().solve(lambda(f.pivots, Eigen::all));
  const MatrixXd a = lambda(f.keep, Eigen::all) - f.v(f.keep, Eigen::all) * bm;
  MatrixXd x = MatrixXd::Zero(f.full_dim, f.full_dim);
  x(f.keep, f.keep) = xr;
  MatrixXd ta = MatrixXd::Zero(f.full_dim, r);
  ta(f.keep, Eigen::all) = a;
  const MatrixXd cross = 0.5 * ta * f.v.transpose();
  x += cross + cross.transpose();
  return x;
}

/// Marks a maximal set of variables whose removal keeps the span of the
/// coefficient map, using a column-pivoted sparse QR.
void find_dependent(Data& d) {
  std::unordered_map<long long, int> row_of;
  std::vector<Eigen::Triplet<double>> trip;
  long long offset = 0;
  auto row = [&](long long key) {
    auto [pos, added] = row_of.try_emplace(key, static_cast<int>(row_of.size()));
    return pos->second;
  };
  for (const auto& b : d.blocks) {
    for (const auto& t : b.terms) {
      for (std::size_t p = 0; p < t.sup.size(); ++p) {
        for (std::size_t q = p; q < t.sup.size(); ++q) {
          const double v = t.a(p, q);
          if (v == 0.0) continue;
          const long long key = offset + static_cast<long long>(t.sup[p]) * b.dim + t.sup[q];
          trip.emplace_back(row(key), t.var, p == q ? v : std::sqrt(2.0) * v);
        }
      }
    }
    offset += static_cast<long long>(b.dim) * b.dim;
  }
  for (int r = 0; r < d.lp.rows; ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(d.lp.a, r); a; ++a) {
      trip.emplace_back(row(offset + r), static_cast<int>(a.col()), a.value());
    }
  }
  offset += d.lp.rows;
  for (int r : d.eq.active) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(d.eq.a, r); a; ++a) {
      trip.emplace_back(row(offset + r), static_cast<int>(a.col()), a.value());
    }
  }
  d.fixed.assign(static_cast<std::size_t>(d.n_vars), 0);
  d.n_fixed = 0;
  if (d.n_vars == 0) return;
  Eigen::SparseMatrix<double> a(std::max<Eigen::Index>(1, static_cast<Eigen::Index>(row_of.size())),
                                d.n_vars);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  double cmax = 0.0;
  for (int j = 0; j < d.n_vars; ++j) cmax = std::max(cmax, a.col(j).norm());
  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-9 * std::max(cmax, 1.0));
  qr.compute(a);
  if (qr.info() != Eigen::Success) return;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = qr.rank(); k < perm.size(); ++k) {
    d.fixed[perm(k)] = 1;
    ++d.n_fixed;
  }
}

Data extract(const sdp::SdoProblem& conic) {
  Data d;
  d.n_vars = conic.n_vars();
  d.c = Eigen::Map<const VectorXd>(conic.objective.data(), d.n_vars);
  d.n_conic_blocks = static_cast<int>(conic.blocks.size());
  std::vector<Eigen::Triplet<double>> lp_trip;
  std::vector<double> lp_c0;
  for (int b = 0; b < d.n_conic_blocks; ++b) {
    const auto& blk = conic.blocks[b];
    if (blk.diagonal) {
      const int base = d.lp.rows;
      for (int r = 0; r < blk.dim; ++r) {
        lp_c0.push_back(blk.constant(r, r));
        d.lp.origin.emplace_back(b, r);
      }
      for (const auto& [j, a] : blk.terms) {
        for (const auto& e : a.entries()) lp_trip.emplace_back(base + e.row, j, e.value);
      }
      d.lp.rows += blk.dim;
      continue;
    }
    Block pb;
    pb.dim = blk.dim;
    pb.c0 = blk.constant.to_dense();
    for (const auto& [j, a] : blk.terms) {
      if (a.empty()) continue;
      Term t;
      t.var = j;
      t.sup = a.support();
      t.a = restrict(a, t.sup).to_dense();
      pb.terms.push_back(std::move(t));
    }
    d.blocks.push_back(std::move(pb));
    d.block_index.push_back(b);
  }
  d.lp.c0 = Eigen::Map<VectorXd>(lp_c0.data(), static_cast<Eigen::Index>(lp_c0.size()));
  d.lp.a.resize(d.lp.rows, d.n_vars);
  d.lp.a.setFromTriplets(lp_trip.begin(), lp_trip.end());
  return d;
}

/// C0 + sum_j y_j A_j
MatrixXd evaluate(const Block& b, const VectorXd& y) {
  MatrixXd f = b.c0;
  for (const auto& t : b.terms) {
    const double v = y(t.var);
    if (v == 0.0) continue;
    for (std::size_t p = 0; p < t.sup.size(); ++p) {
      for (std::size_t q = 0; q < t.sup.size(); ++q) f(t.sup[p], t.sup[q]) += v * t.a(p, q);
    }
  }
  return f;
}

/// <A_j, R> restricted to the support.
double inner(const Term& t, const MatrixXd& r) {
  double v = 0.0;
  for (std::size_t p = 0; p < t.sup.size(); ++p) {
    for (std::size_t q = 0; q < t.sup.size(); ++q) v += t.a(p, q) * r(t.sup[q], t.sup[p]);
  }
  return v;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Largest alpha with M + alpha dM >= 0 given the Cholesky factor of M.
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dm) {
  if (dm.rows() == 0) return std::numeric_limits<double>::infinity();
  const auto l = llt.matrixL();
  MatrixXd t = l.solve(dm);
  t = l.solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_lp(const VectorXd& v, const VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

/// Schur complement matrix M dy = rhs, dense or sparse depending on fill.
class Schur {
 public:
  explicit Schur(const Data& d) : n_(d.n_vars) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const auto& b : d.blocks) {
      for (const auto& ti : b.terms) {
        for (const auto& tj : b.terms) adj[ti.var].push_back(tj.var);
      }
    }
    for (int r = 0; r < d.lp.rows; ++r) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(d.lp.a, r); a; ++a) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator b(d.lp.a, r); b; ++b) {
          adj[a.col()].push_back(static_cast<int>(b.col()));
        }
      }
    }
    for (int r : d.eq.active) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(d.eq.a, r); a; ++a) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator b(d.eq.a, r); b; ++b) {
          adj[a.col()].push_back(static_cast<int>(b.col()));
        }
      }
    }
    std::size_t nnz = 0;
    for (int i = 0; i < n_; ++i) {
      adj[i].push_back(i);
      std::sort(adj[i].begin(), adj[i].end());
      adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
      nnz += adj[i].size();
    }
    dense_ = n_ <= 400 || static_cast<double>(nnz) > 0.15 * n_ * static_cast<double>(n_);
    if (!dense_) {
      std::vector<Eigen::Triplet<double>> trip;
      for (int i = 0; i < n_; ++i) {
        for (int j : adj[i]) {
          if (j <= i) trip.emplace_back(i, j, 0.0);
        }
      }
      sparse_.resize(n_, n_);
      sparse_.setFromTriplets(trip.begin(), trip.end());
      sparse_.makeCompressed();
      sllt_.analyzePattern(sparse_);
    }
  }

  bool dense() const { return dense_; }

  double max_diag() const {
    if (dense_) return n_ ? dm_.diagonal().cwiseAbs().maxCoeff() : 0.0;
    double m = 0.0;
    for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(sparse_.coeff(i, i)));
    return m;
  }

  void reset() {
    if (dense_) {
      dm_.setZero(n_, n_);
    } else {
      for (int k = 0; k < sparse_.nonZeros(); ++k) sparse_.valuePtr()[k] = 0.0;
    }
  }

  /// Adds v at (i, j) and (j, i); call once per unordered pair.
  void add(int i, int j, double v) {
    if (i < j) std::swap(i, j);
    if (dense_) {
      dm_(i, j) += v;
    } else {
      sparse_.coeffRef(i, j) += v;
    }
  }

  /// Cholesky factorization of the diagonally scaled matrix, with a small
  /// diagonal shift when it is not numerically positive definite.
  bool factor() {
    VectorXd dg(n_);
    for (int i = 0; i < n_; ++i) dg(i) = dense_ ? dm_(i, i) : sparse_.coeff(i, i);
    scale_ = dg.unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; });
    for (double reg : {0.0, 1e-14, 1e-12, 1e-10, 1e-8}) {
      if (dense_) {
        MatrixXd m = dm_.selfadjointView<Eigen::Lower>();
        m = scale_.asDiagonal() * m * scale_.asDiagonal();
        m.diagonal().array() += reg;
        dllt_.compute(m);
        if (dllt_.info() == Eigen::Success) {
          regularized_ += reg > 0.0;
          return true;
        }
      } else {
        Eigen::SparseMatrix<double> m = scale_.asDiagonal() * sparse_ * scale_.asDiagonal();
        if (reg > 0.0) {
          for (int i = 0; i < n_; ++i) m.coeffRef(i, i) += reg;
        }
        sllt_.factorize(m);
        if (sllt_.info() == Eigen::Success) {
          regularized_ += reg > 0.0;
          return true;
        }
      }
    }
    return false;
  }

  /// Solve with iterative refinement against the unregularized matrix.
  VectorXd solve(const VectorXd& rhs) const {
    VectorXd x = raw_solve(rhs);
    const double rn = rhs.norm();
    for (int k = 0; k < 3; ++k) {
      const VectorXd r = rhs - product(x);
      if (r.norm() <= 1e-15 * rn) break;
      x += raw_solve(r);
    }
    return x;
  }

  int regularized() const { return regularized_; }

  /// One solve with the (possibly shifted) factor, several right-hand sides.
  MatrixXd raw_solve(const MatrixXd& rhs) const {
    const MatrixXd r = scale_.asDiagonal() * rhs;
    return scale_.asDiagonal() * (dense_ ? MatrixXd(dllt_.solve(r)) : MatrixXd(sllt_.solve(r)));
  }

  VectorXd product(const VectorXd& x) const {
    if (dense_) return dm_.selfadjointView<Eigen::Lower>() * x;
    return sparse_.selfadjointView<Eigen::Lower>() * x;
  }

 private:

  int n_;
  int regularized_ = 0;
  bool dense_ = true;
  VectorXd scale_;
  MatrixXd dm_;
  Eigen::LLT<MatrixXd> dllt_;
  Eigen::SparseMatrix<double> sparse_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>
      sllt_;
};

struct Iterate {
  VectorXd y;
  std::vector<MatrixXd> x, s;
  VectorXd z, sl;  ///< LP dual and slack
  VectorXd lam;    ///< multipliers of the equalities
};

struct Direction {
  VectorXd dy;
  std::vector<MatrixXd> dx, ds;
  VectorXd dz, dsl, dlam;
};

bool structurally_infeasible(const sdp::SdoProblem& p, std::string& why) {
  for (const auto& v : p.vars) {
    if (v.lower > v.upper) {
      why = "bounds of '" + v.name + "' are empty";
      return true;
    }
  }
  for (const auto& c : p.linear) {
    double lo = 0.0, hi = 0.0;
    for (const auto& [j, a] : c.terms) {
      const auto& v = p.vars[j];
      lo += a > 0 ? a * v.lower : a * v.upper;
      hi += a > 0 ? a * v.upper : a * v.lower;
    }
    if ((c.relation != sdp::Relation::ge && lo > c.rhs) ||
        (c.relation != sdp::Relation::le && hi < c.rhs)) {
      why = "linear constraint '" + c.name + "' cannot be met within the bounds";
      return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::max_iters: return "max_iters";
    case Status::infeasible: return "infeasible";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "numerical_failure";
}

void SolveOptions::validate() const {
  if (!(rel_gap_tol > 0.0) || !(feas_tol > 0.0)) throw DomainError("tolerances must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
    throw DomainError("step_fraction must lie in (0, 1)");
  }
  if (!(time_limit >= 0.0)) throw DomainError("time_limit must be non-negative");
}

SolveReport solve(const sdp::SdoProblem& problem, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  SolveReport rep;
  rep.x.assign(static_cast<std::size_t>(problem.n_vars()), 0.0);
  {
    std::string why;
    if (structurally_infeasible(problem, why)) {
      rep.status = Status::infeasible;
      rep.message = why;
      rep.total_time = elapsed();
      return rep;
    }
  }
  const sdp::SdoProblem conic = sdp::to_conic(problem);
  if (conic.blocks.empty()) throw DomainError("problem has no constraint blocks");
  Data d = extract(conic);
  reduce_faces(d);
  find_dependent(d);
  const int nb = static_cast<int>(d.blocks.size());
  const int nv = d.n_vars;
  const double nu = [&] {
    double s = d.lp.rows;
    for (const auto& b : d.blocks) s += b.dim;
    return s;
  }();

  // Data norms for the starting point and the relative residuals.
  double c0_norm = d.lp.c0.size() ? d.lp.c0.norm() : 0.0;
  for (const auto& b : d.blocks) c0_norm = std::max(c0_norm, b.c0.norm());
  const double c_norm = d.c.norm();

  Iterate it;
  it.y = VectorXd::Zero(nv);
  for (const auto& b : d.blocks) {
    double a_max = 0.0, ratio = 0.0;
    for (const auto& t : b.terms) {
      const double an = t.a.norm();
      a_max = std::max(a_max, an);
      ratio = std::max(ratio, (1.0 + std::abs(d.c(t.var))) / (1.0 + an));
    }
    const double dim = b.dim;
    const double xi = std::max({10.0, std::sqrt(dim), dim * ratio});
    const double eta = std::max({10.0, std::sqrt(dim), b.c0.norm(), a_max});
    it.x.push_back(xi * MatrixXd::Identity(b.dim, b.dim));
    it.s.push_back(eta * MatrixXd::Identity(b.dim, b.dim));
  }
  {
    double a_max = 0.0, ratio = 0.0;
    const Eigen::SparseMatrix<double> ac = d.lp.a;
    for (int j = 0; j < nv && d.lp.rows > 0; ++j) {
      const double an = ac.col(j).norm();
      if (an == 0.0) continue;
      a_max = std::max(a_max, an);
      ratio = std::max(ratio, (1.0 + std::abs(d.c(j))) / (1.0 + an));
    }
    const double dim = std::max(1, d.lp.rows);
    const double xi = std::max({10.0, std::sqrt(dim), dim * ratio});
    const double eta = std::max({10.0, std::sqrt(dim), d.lp.c0.norm(), a_max});
    it.z = VectorXd::Constant(d.lp.rows, xi);
    it.sl = VectorXd::Constant(d.lp.rows, eta);
  }

  it.lam = VectorXd::Zero(d.eq.rows);

  Schur schur(d);
  const Eigen::SparseMatrix<double> lp_at = d.lp.a.transpose();
  const Eigen::SparseMatrix<double> eq_at = d.eq.a.transpose();
  const int ne = static_cast<int>(d.eq.active.size());
  // Active equality rows with the fixed variables removed.
  MatrixXd e_free = MatrixXd::Zero(ne, nv);
  for (int k = 0; k < ne; ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(d.eq.a, d.eq.active[k]); a; ++a) {
      if (!d.fixed[a.col()]) e_free(k, a.col()) = a.value();
    }
  }
  const Eigen::SparseMatrix<double> e_free_sp = e_free.sparseView();
  const Eigen::SparseMatrix<double> ete = e_free_sp.transpose() * e_free_sp;
  MatrixXd u;                  // M^{-1} E^T
  Eigen::LDLT<MatrixXd> g_ldlt;  // E M^{-1} E^T

  // Per-iteration scratch.
  std::vector<MatrixXd> s_inv(nb), rp(nb);
  std::vector<Eigen::LLT<MatrixXd>> s_chol(nb), x_chol(nb);
  std::vector<std::vector<MatrixXd>> w(nb), zt(nb);
  VectorXd rp_lp, rd, re, re_act;

  auto finish = [&](Status st, const std::string& msg) {
    rep.status = st;
    rep.face.assign(static_cast<std::size_t>(d.n_conic_blocks), MatrixXd());
    for (int b = 0; b < nb; ++b) {
      const int dim = conic.blocks[d.block_index[b]].dim;
      rep.face[d.block_index[b]] = d.faces[b].reduced ? d.faces[b].v : MatrixXd(dim, 0);
    }
    rep.message = msg;
    rep.x.assign(it.y.data(), it.y.data() + nv);
    rep.dual.assign(static_cast<std::size_t>(d.n_conic_blocks), MatrixXd());
    std::vector<MatrixXd> lambda(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      if (d.faces[b].reduced) lambda[b] = MatrixXd::Zero(d.faces[b].full_dim, d.faces[b].v.cols());
    }
    for (int k = 0; k < d.eq.rows; ++k) {
      const auto& o = d.eq.origin[k];
      lambda[o.block](o.row, o.col) = it.lam(k);
    }
    for (int b = 0; b < nb; ++b) {
      rep.dual[d.block_index[b]] =
          d.faces[b].reduced ? expand_dual(d.faces[b], it.x[b], lambda[b]) : it.x[b];
    }
    for (int r = 0; r < d.lp.rows; ++r) {
      const auto [blk, row] = d.lp.origin[r];
      auto& m = rep.dual[blk];
      if (m.size() == 0) m = MatrixXd::Zero(conic.blocks[blk].dim, 1);
      m(row, 0) = it.z(r);
    }
    rep.total_time = elapsed();
    rep.per_iter_time = rep.iterations > 0 ? rep.total_time / rep.iterations : rep.total_time;
    rep.opt_status_metric = rep.dual_objective != 0.0
                                ? rep.objective / rep.dual_objective
                                : (rep.objective == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    return rep;
  };

  int stalls = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    // Residuals and objectives.
    double dobj = 0.0, xs = 0.0, pinf = 0.0;
    rd = d.c;
    for (int b = 0; b < nb; ++b) {
      const auto& blk = d.blocks[b];
      rp[b] = evaluate(blk, it.y) - it.s[b];
      pinf = std::max(pinf, rp[b].norm());
      dobj -= (blk.c0.cwiseProduct(it.x[b])).sum();
      xs += (it.x[b].cwiseProduct(it.s[b])).sum();
      for (const auto& t : blk.terms) rd(t.var) -= inner(t, it.x[b]);
    }
    if (d.lp.rows) {
      rp_lp = d.lp.c0 + d.lp.a * it.y - it.sl;
      pinf = std::max(pinf, rp_lp.norm());
      dobj -= d.lp.c0.dot(it.z);
      xs += it.z.dot(it.sl);
      rd -= lp_at * it.z;
    }
    if (d.eq.rows) {
      re = d.eq.c0 + d.eq.a * it.y;
      pinf = std::max(pinf, re.norm());
      dobj -= d.eq.c0.dot(it.lam);
      rd -= eq_at * it.lam;
      re_act.resize(ne);
      for (int k = 0; k < ne; ++k) re_act(k) = re(d.eq.active[k]);
    }
    const double pobj = d.c.dot(it.y);
    const double mu = xs / nu;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double comp_gap = xs / (1.0 + std::abs(pobj) + std::abs(dobj));
    pinf /= 1.0 + c0_norm;
    const double dinf = rd.norm() / (1.0 + c_norm);

    rep.objective = pobj;
    rep.dual_objective = dobj;
    rep.final_gap = std::max(rel_gap, comp_gap);
    rep.primal_infeas = pinf;
    rep.dual_infeas = dinf;
    rep.iterations = iter;

    IterationLog log{iter, pobj, dobj, rep.final_gap, pinf, dinf, mu, 0.0, 0.0};
    if (!rep.history.empty()) {
      log.step_primal = rep.history.back().step_primal;
      log.step_dual = rep.history.back().step_dual;
    }

    const bool converged = rep.final_gap <= opts.rel_gap_tol && pinf <= opts.feas_tol &&
                           dinf <= opts.feas_tol;
    const bool loosely = rep.final_gap <= 1e3 * opts.rel_gap_tol &&
                         pinf <= 1e3 * opts.feas_tol && dinf <= 1e3 * opts.feas_tol;
    auto stop_status = [&] { return loosely ? Status::near_optimal : Status::numerical_failure; };
    if (converged) {
      rep.history.push_back(log);
      return finish(Status::optimal, "converged");
    }
    if (opts.time_limit > 0.0 && elapsed() > opts.time_limit) {
      rep.history.push_back(log);
      return finish(Status::max_iters, "time limit reached");
    }
    // Slow tail: close to the optimum but the gap no longer halves.
    if (loosely && iter >= 10 && rep.history[iter - 10].rel_gap < 2.0 * rep.final_gap) {
      rep.history.push_back(log);
      return finish(Status::near_optimal, "stalled near the optimum");
    }
    if (iter >= opts.max_iters) {
      rep.history.push_back(log);
      return finish(loosely ? Status::near_optimal : Status::max_iters,
                    "iteration limit reached");
    }

    // Factorizations of S and X, S^{-1}.
    bool ok = true;
    for (int b = 0; b < nb && ok; ++b) {
      s_chol[b].compute(it.s[b]);
      x_chol[b].compute(it.x[b]);
      ok = s_chol[b].info() == Eigen::Success && x_chol[b].info() == Eigen::Success;
      if (ok) {
        s_inv[b] = s_chol[b].solve(MatrixXd::Identity(it.s[b].rows(), it.s[b].cols()));
        s_inv[b] = sym(s_inv[b]);
      }
    }
    if (!ok) {
      rep.history.push_back(log);
      return finish(stop_status(), "iterate lost positive definiteness");
    }

    // Schur complement M_ij = <A_i, X A_j S^{-1}> plus the LP part.
    schur.reset();
    for (int b = 0; b < nb; ++b) {
      const auto& blk = d.blocks[b];
      const int nt = static_cast<int>(blk.terms.size());
      w[b].resize(nt);
      zt[b].resize(nt);
      for (int i = 0; i < nt; ++i) {
        const auto& t = blk.terms[i];
        MatrixXd xr(t.sup.size(), blk.dim), sr(t.sup.size(), blk.dim);
        for (std::size_t p = 0; p < t.sup.size(); ++p) {
          xr.row(p) = it.x[b].row(t.sup[p]);
          sr.row(p) = s_inv[b].row(t.sup[p]);
        }
        w[b][i] = t.a * xr;
        zt[b][i] = t.a * sr;
      }
      for (int i = 0; i < nt; ++i) {
        const auto& ti = blk.terms[i];
        for (int j = i; j < nt; ++j) {
          const auto& tj = blk.terms[j];
          double v = 0.0;
          for (std::size_t p = 0; p < ti.sup.size(); ++p) {
            for (std::size_t q = 0; q < tj.sup.size(); ++q) {
              v += w[b][i](p, tj.sup[q]) * zt[b][j](q, ti.sup[p]);
            }
          }
          if (!d.fixed[ti.var] && !d.fixed[tj.var]) schur.add(ti.var, tj.var, v);
        }
      }
    }
    VectorXd lp_w;
    if (d.lp.rows) {
      lp_w = it.z.cwiseQuotient(it.sl);
      for (int r = 0; r < d.lp.rows; ++r) {
        using It = Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator;
        for (It a(d.lp.a, r); a; ++a) {
          for (It b(d.lp.a, r); b; ++b) {
            if (b.col() < a.col() || d.fixed[a.col()] || d.fixed[b.col()]) continue;
            schur.add(static_cast<int>(a.col()), static_cast<int>(b.col()),
                      lp_w(r) * a.value() * b.value());
          }
        }
      }
    }
    double rho = 0.0;
    if (ne) {
      double emax = 0.0;
      for (int k = 0; k < ne; ++k) emax = std::max(emax, e_free.row(k).squaredNorm());
      rho = std::max(schur.max_diag(), 1e-8) / std::max(emax, 1e-300);
      for (int k = 0; k < ete.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator a(ete, k); a; ++a) {
          if (a.row() <= a.col()) schur.add(static_cast<int>(a.row()), static_cast<int>(a.col()), rho * a.value());
        }
      }
    }
    for (int j = 0; j < nv; ++j) {
      if (d.fixed[j]) schur.add(j, j, 1.0);
    }
    if (!schur.factor()) {
      rep.history.push_back(log);
      return finish(stop_status(), "Schur complement factorization failed");
    }
    if (ne) {
      u = schur.raw_solve(e_free.transpose());
      g_ldlt.compute(sym(e_free_sp * u));
      if (g_ldlt.info() != Eigen::Success) {
        rep.history.push_back(log);
        return finish(stop_status(), "equality system factorization failed");
      }
    }

    // X Rp S^{-1}, shared by predictor and corrector.
    std::vector<MatrixXd> xrs(nb);
    for (int b = 0; b < nb; ++b) xrs[b] = it.x[b] * rp[b] * s_inv[b];

    auto direction = [&](double sigma_mu, const Direction* corr) {
      Direction dir;
      VectorXd rhs = -rd;
      std::vector<MatrixXd> r(nb);
      for (int b = 0; b < nb; ++b) {
        r[b] = sigma_mu * s_inv[b] - it.x[b] - xrs[b];
        if (corr) r[b] -= corr->dx[b] * corr->ds[b] * s_inv[b];
        for (const auto& t : d.blocks[b].terms) rhs(t.var) += inner(t, r[b]);
      }
      VectorXd r_lp;
      if (d.lp.rows) {
        r_lp = (sigma_mu * it.sl.cwiseInverse() - it.z - lp_w.cwiseProduct(rp_lp)).eval();
        if (corr) r_lp -= corr->dz.cwiseProduct(corr->dsl).cwiseQuotient(it.sl);
        rhs += lp_at * r_lp;
      }
      if (ne) rhs -= rho * (e_free_sp.transpose() * re_act);
      for (int j = 0; j < nv; ++j) {
        if (d.fixed[j]) rhs(j) = 0.0;
      }
      dir.dlam = VectorXd::Zero(d.eq.rows);
      if (ne) {
        // M dy - E^T dl = rhs, E dy = -re by the range-space method, refined
        // on the whole system.
        const VectorXd rhs2 = -re_act;
        auto range_solve = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& y, VectorXd& l) {
          y = schur.raw_solve(r1);
          l = g_ldlt.solve(r2 - e_free_sp * y);
          y += u * l;
        };
        VectorXd dl;
        range_solve(rhs, rhs2, dir.dy, dl);
        const double scale = rhs.norm() + rhs2.norm();
        for (int k = 0; k < 3; ++k) {
          const VectorXd r1 = rhs - schur.product(dir.dy) + e_free_sp.transpose() * dl;
          const VectorXd r2 = rhs2 - e_free_sp * dir.dy;
          if (r1.norm() + r2.norm() <= 1e-15 * scale) break;
          VectorXd cy, cl;
          range_solve(r1, r2, cy, cl);
          dir.dy += cy;
          dl += cl;
        }
        for (int k = 0; k < ne; ++k) dir.dlam(d.eq.active[k]) = dl(k);
      } else {
        dir.dy = schur.solve(rhs);
      }
      dir.dx.resize(nb);
      dir.ds.resize(nb);
      for (int b = 0; b < nb; ++b) {
        MatrixXd ads = MatrixXd::Zero(d.blocks[b].dim, d.blocks[b].dim);
        for (const auto& t : d.blocks[b].terms) {
          const double v = dir.dy(t.var);
          if (v == 0.0) continue;
          for (std::size_t p = 0; p < t.sup.size(); ++p) {
            for (std::size_t q = 0; q < t.sup.size(); ++q) ads(t.sup[p], t.sup[q]) += v * t.a(p, q);
          }
        }
        dir.ds[b] = rp[b] + ads;
        dir.dx[b] = sym(r[b] - it.x[b] * ads * s_inv[b]);
      }
      if (d.lp.rows) {
        dir.dsl = rp_lp + d.lp.a * dir.dy;
        dir.dz = r_lp - lp_w.cwiseProduct(d.lp.a * dir.dy);
      }
      return dir;
    };

    auto steps = [&](const Direction& dir) {
      double ap = max_step_lp(it.sl, dir.dsl);
      double ad = max_step_lp(it.z, dir.dz);
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(s_chol[b], dir.ds[b]));
        ad = std::min(ad, max_step(x_chol[b], dir.dx[b]));
      }
      return std::pair<double, double>(ap, ad);
    };

    // Predictor.
    const Direction aff = direction(0.0, nullptr);
    auto [ap_max, ad_max] = steps(aff);
    const double ap_a = std::min(1.0, ap_max);
    const double ad_a = std::min(1.0, ad_max);
    double xs_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      xs_aff += ((it.x[b] + ad_a * aff.dx[b]).cwiseProduct(it.s[b] + ap_a * aff.ds[b])).sum();
    }
    if (d.lp.rows) xs_aff += (it.z + ad_a * aff.dz).dot(it.sl + ap_a * aff.dsl);
    const double sigma = std::clamp(std::pow(std::max(xs_aff, 0.0) / xs, 3.0), 0.0, 1.0);

    // Corrector.
    const Direction dir = direction(sigma * mu, &aff);
    std::tie(ap_max, ad_max) = steps(dir);
    double ap = std::min(1.0, opts.step_fraction * ap_max);
    double ad = std::min(1.0, opts.step_fraction * ad_max);
    // Rounding can leave the eigenvalue bound slightly optimistic.
    auto pd_after = [&](const std::vector<MatrixXd>& m, const std::vector<MatrixXd>& dm, double a) {
      for (int b = 0; b < nb; ++b) {
        Eigen::LLT<MatrixXd> llt(sym(m[b] + a * dm[b]));
        if (llt.info() != Eigen::Success) return false;
      }
      return true;
    };
    for (int k = 0; k < 20 && ap > 0.0 && !pd_after(it.s, dir.ds, ap); ++k) ap *= 0.8;
    for (int k = 0; k < 20 && ad > 0.0 && !pd_after(it.x, dir.dx, ad); ++k) ad *= 0.8;
    log.step_primal = ap;
    log.step_dual = ad;
    rep.history.push_back(log);
    if (opts.log) {
      *opts.log << std::setw(4) << iter << std::scientific << std::setprecision(6) << "  pobj "
                << pobj << "  dobj " << dobj << "  gap " << std::setprecision(2)
                << rep.final_gap << "  pinf " << pinf << "  dinf " << dinf << "  mu " << mu
                << "  ap " << ap << "  ad " << ad << std::defaultfloat << '\n';
    }

    it.y += ap * dir.dy;
    for (int b = 0; b < nb; ++b) {
      it.s[b] = sym(it.s[b] + ap * dir.ds[b]);
      it.x[b] = sym(it.x[b] + ad * dir.dx[b]);
    }
    if (d.lp.rows) {
      it.sl += ap * dir.dsl;
      it.z += ad * dir.dz;
    }
    if (d.eq.rows) it.lam += ad * dir.dlam;

    const double merit = rep.final_gap + pinf + dinf;
    if (merit < 0.999 * best_merit) {
      best_merit = merit;
      stalls = 0;
    } else if (++stalls >= 8 || std::max(ap, ad) < 1e-10) {
      rep.iterations = iter + 1;
      return finish(stop_status(), "no further progress (" +
                                       std::to_string(schur.regularized()) +
                                       " regularized Schur factorizations)");
    }
  }
}

}  // namespace arrowsdp::ipm
