#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "arrowsdp/decomp.hpp"

namespace arrowsdp::decomp {

namespace {

bool in_set(const IndexSet& s, int i) {
  return std::binary_search(s.begin(), s.end(), i);
}

/// Smallest l > k whose stored intersection with k contains `row`.
int next_owner(const Partition& part, int k, int row) {
  for (int l = k + 1; l < part.size(); ++l) {
    const IndexSet* inter = part.intersection(k, l);
    if (inter && in_set(*inter, row)) return l;
  }
  return -1;
}

void add_dense_block(std::vector<Entry>& out, const Eigen::MatrixXd& d,
                     int row_offset, int col_offset, double sign) {
  for (int j = 0; j < d.cols(); ++j) {
    for (int i = 0; i < d.rows(); ++i) {
      if (d(i, j) != 0.0) {
        out.push_back({row_offset + i, col_offset + j, sign * d(i, j)});
      }
    }
  }
}

void add_sym_dense(std::vector<Entry>& out, const Eigen::MatrixXd& c,
                   int offset) {
  for (int j = 0; j < c.cols(); ++j) {
    for (int i = 0; i <= j; ++i) {
      if (c(i, j) != 0.0) out.push_back({offset + i, offset + j, c(i, j)});
    }
  }
}

}  // namespace

void ArrowSystem::validate() const {
  if (n < 1 || m < 1) throw DomainError("arrow system needs n >= 1 and m >= 1");
  if (partition.n != n) throw DomainError("partition dimension differs from n");
  if (static_cast<int>(parts.size()) != partition.size()) {
    throw DomainError("number of parts differs from the number of index sets");
  }
  if (c.dim() != m) throw DomainError("C must be m x m");
  for (int k = 0; k < static_cast<int>(parts.size()); ++k) {
    const auto& part = parts[k];
    const auto& set = partition.sets[k];
    if (part.a.dim() != n) throw DomainError("A_k must be n x n");
    if (part.b.rows() != n || part.b.cols() != m) {
      throw DomainError("B_k must be n x m");
    }
    if (!part.b.allFinite()) throw DomainError("B_k has non-finite entries");
    for (const auto& e : part.a.entries()) {
      if (!in_set(set, e.row) || !in_set(set, e.col)) {
        throw DomainError("A_" + std::to_string(k) +
                          " has entries outside its index set");
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!in_set(set, i) && part.b.row(i).cwiseAbs().maxCoeff() != 0.0) {
        throw DomainError("B_" + std::to_string(k) +
                          " has rows outside its index set");
      }
    }
  }
  for (const auto& [key, inter] : partition.pairs) {
    if (static_cast<int>(inter.size()) <= m) {
      throw DomainError("arrow width m must be smaller than every intersection");
    }
  }
}

SymMat ArrowSystem::shaft() const {
  SymMat a(n);
  for (const auto& part : parts) a = a + part.a;
  return a;
}

Eigen::MatrixXd ArrowSystem::coupling() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, m);
  for (const auto& part : parts) b += part.b;
  return b;
}

SymMat ArrowSystem::part_matrix(int k) const {
  const auto& part = parts.at(k);
  std::vector<Entry> e(part.a.entries().begin(), part.a.entries().end());
  add_dense_block(e, part.b, 0, n, 1.0);
  return SymMat::from_entries(n + m, e);
}

SymMat ArrowSystem::assemble() const {
  std::vector<Entry> e;
  for (const auto& part : parts) {
    e.insert(e.end(), part.a.entries().begin(), part.a.entries().end());
    add_dense_block(e, part.b, 0, n, 1.0);
  }
  for (const auto& ce : c.entries()) e.push_back({n + ce.row, n + ce.col, ce.value});
  return SymMat::from_entries(n + m, e);
}

std::vector<SymMat> arrow_blocks(const ArrowSystem& sys,
                                 const std::map<PairKey, Eigen::MatrixXd>& d,
                                 std::span<const Eigen::MatrixXd> c_parts) {
  const int p = static_cast<int>(sys.parts.size());
  if (static_cast<int>(c_parts.size()) != p) {
    throw DomainError("one C_k per part is required");
  }
  for (const auto& [key, dk] : d) {
    if (key.first < 0 || key.second >= p || key.first >= key.second) {
      throw DomainError("D key out of range");
    }
    if (dk.rows() != sys.n || dk.cols() != sys.m) {
      throw DomainError("D_{k,l} must be n x m");
    }
  }
  std::vector<SymMat> out;
  out.reserve(p);
  for (int k = 0; k < p; ++k) {
    const auto& ck = c_parts[k];
    if (ck.rows() != sys.m || ck.cols() != sys.m) {
      throw DomainError("C_k must be m x m");
    }
    const auto& part = sys.parts[k];
    std::vector<Entry> e(part.a.entries().begin(), part.a.entries().end());
    add_dense_block(e, part.b, 0, sys.n, 1.0);
    for (const auto& [key, dk] : d) {
      if (key.second == k) add_dense_block(e, dk, 0, sys.n, -1.0);
      if (key.first == k) add_dense_block(e, dk, 0, sys.n, 1.0);
    }
    add_sym_dense(e, 0.5 * (ck + ck.transpose()), sys.n);
    out.push_back(SymMat::from_entries(sys.n + sys.m, e));
  }
  return out;
}

ArrowSplit arrow_decompose(const ArrowSystem& sys, double tol) {
  sys.validate();
  const int p = static_cast<int>(sys.parts.size());
  const int n = sys.n;
  const int m = sys.m;
  if (p >= 2) sys.partition.require_assumptions();
  for (int k = 0; k < p; ++k) {
    if (!is_psd(sys.parts[k].a, tol)) {
      throw PreconditionError("A_k positive semidefinite",
                              "A_" + std::to_string(k) + " is not PSD");
    }
  }
  {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.c.to_dense());
    if (llt.info() != Eigen::Success) {
      throw PreconditionError("C positive definite", "Cholesky of C failed");
    }
  }

  const Eigen::SparseMatrix<double> a = sys.shaft().to_sparse();
  const Eigen::MatrixXd b = sys.coupling();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>>
      ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw ConditioningError("factorization of A failed");
  }
  const Eigen::VectorXd piv = ldlt.vectorD();
  const double piv_max = piv.cwiseAbs().maxCoeff();
  if (piv.minCoeff() <= 1e-13 * piv_max) {
    throw ConditioningError("A is singular or numerically singular");
  }

  Eigen::MatrixXd x = ldlt.solve(b);
  const double b_norm = b.norm();
  const double a_norm = sys.shaft().norm_inf();
  Eigen::MatrixXd r = b - a * x;
  for (int it = 0; it < 5 && r.norm() > 1e-12 * b_norm; ++it) {
    x += ldlt.solve(r);
    r = b - a * x;
  }
  if (!x.allFinite() ||
      r.norm() > 1e-12 * (b_norm + a_norm * x.norm()) + 1e-300) {
    throw ConditioningError("solve for A^{-1}B did not reach the requested accuracy");
  }

  ArrowSplit out;
  out.x = x;
  std::vector<Eigen::MatrixXd> ak_x(p);
  for (int k = 0; k < p; ++k) ak_x[k] = sys.parts[k].a.to_sparse() * x;

  const double scale = std::max({1.0, a_norm * x.cwiseAbs().maxCoeff(),
                                 b.cwiseAbs().maxCoeff()});
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXd res = ak_x[k] - sys.parts[k].b;
    for (const auto& [key, dk] : out.d) {
      if (key.second == k) res += dk;
    }
    for (int i = 0; i < n; ++i) {
      if (res.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
      const int l = next_owner(sys.partition, k, i);
      if (l < 0) {
        if (res.row(i).cwiseAbs().maxCoeff() > 1e3 * tol * scale) {
          throw ContractViolation("sequential D solve left residual in row " +
                                  std::to_string(i));
        }
        continue;
      }
      auto [it, fresh] = out.d.try_emplace({k, l}, Eigen::MatrixXd::Zero(n, m));
      it->second.row(i) = res.row(i);
    }
  }
  for (const auto& [key, inter] : sys.partition.pairs) {
    out.d.try_emplace(key, Eigen::MatrixXd::Zero(n, m));
  }

  Eigen::MatrixXd c_rest = sys.c.to_dense();
  out.c_parts.resize(p);
  for (int k = 0; k + 1 < p; ++k) {
    out.c_parts[k] = x.transpose() * ak_x[k];
    out.c_parts[k] = 0.5 * (out.c_parts[k] + out.c_parts[k].transpose());
    c_rest -= out.c_parts[k];
  }
  out.c_parts[p - 1] = c_rest;
  out.blocks = arrow_blocks(sys, out.d, out.c_parts);
  return out;
}

std::map<PairKey, SymMat> arrow_to_embedded(const ArrowSystem& sys,
                                            const ArrowSplit& split) {
  const int p = static_cast<int>(sys.parts.size());
  const int n = sys.n;
  const int m = sys.m;
  std::map<PairKey, Eigen::MatrixXd> e;
  for (int k = 0; k + 1 < p; ++k) {
    Eigen::MatrixXd carry = split.c_parts.at(k);
    for (const auto& [key, ek] : e) {
      if (key.second == k) carry += ek;
    }
    int target = -1;
    for (int l = k + 1; l < p && target < 0; ++l) {
      if (sys.partition.intersection(k, l)) target = l;
    }
    if (target < 0) {
      throw DomainError("part " + std::to_string(k) +
                        " has no later neighbour to pass its C share to");
    }
    e[{k, target}] = carry;
  }
  std::map<PairKey, SymMat> out;
  for (const auto& [key, inter] : sys.partition.pairs) {
    std::vector<Entry> ent;
    auto d = split.d.find(key);
    if (d != split.d.end()) add_dense_block(ent, d->second, 0, n, 1.0);
    auto c = e.find(key);
    if (c != e.end()) add_sym_dense(ent, 0.5 * (c->second + c->second.transpose()), n);
    out.emplace(key, SymMat::from_entries(n + m, ent));
  }
  return out;
}

}  // namespace arrowsdp::decomp
