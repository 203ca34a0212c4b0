#include <algorithm>
#include <cmath>
#include <string>

#include "arrowsdp/matcore.hpp"

namespace arrowsdp {

namespace {

void check_index(int i, int n) {
  if (i < 0 || i >= n) {
    throw DomainError("index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(n) + ")");
  }
}

bool key_less(const Entry& a, const Entry& b) {
  return a.row < b.row || (a.row == b.row && a.col < b.col);
}

// Sorts, merges duplicate keys and drops exact zeros.
std::vector<Entry> canonicalize(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), key_less);
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
  return out;
}

}  // namespace

SymMat::SymMat(int n) : n_(n) {
  if (n < 0) throw DomainError("negative dimension");
}

SymMat SymMat::from_entries(int n, std::span<const Entry> entries) {
  SymMat m(n);
  std::vector<Entry> tmp;
  tmp.reserve(entries.size());
  for (auto e : entries) {
    check_index(e.row, n);
    check_index(e.col, n);
    if (!std::isfinite(e.value)) throw DomainError("non-finite matrix entry");
    if (e.row > e.col) std::swap(e.row, e.col);
    tmp.push_back(e);
  }
  m.entries_ = canonicalize(std::move(tmp));
  return m;
}

SymMat SymMat::from_dense(const Eigen::MatrixXd& dense, double zero_tol) {
  if (dense.rows() != dense.cols()) throw DomainError("matrix is not square");
  const int n = static_cast<int>(dense.rows());
  std::vector<Entry> e;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double v = 0.5 * (dense(i, j) + dense(j, i));
      if (std::abs(v) > zero_tol) e.push_back({i, j, v});
    }
  }
  return from_entries(n, e);
}

SymMat SymMat::identity(int n) {
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return from_entries(n, e);
}

double SymMat::operator()(int i, int j) const {
  check_index(i, n_);
  check_index(j, n_);
  if (i > j) std::swap(i, j);
  const Entry key{i, j, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key, key_less);
  if (it != entries_.end() && it->row == i && it->col == j) return it->value;
  return 0.0;
}

Eigen::MatrixXd SymMat::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : entries_) {
    d(e.row, e.col) = e.value;
    d(e.col, e.row) = e.value;
  }
  return d;
}

Eigen::SparseMatrix<double> SymMat::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * entries_.size());
  for (const auto& e : entries_) {
    t.emplace_back(e.row, e.col, e.value);
    if (e.row != e.col) t.emplace_back(e.col, e.row, e.value);
  }
  Eigen::SparseMatrix<double> s(n_, n_);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

double SymMat::norm_inf() const {
  std::vector<double> rows(static_cast<std::size_t>(n_), 0.0);
  for (const auto& e : entries_) {
    rows[e.row] += std::abs(e.value);
    if (e.row != e.col) rows[e.col] += std::abs(e.value);
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

double SymMat::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
  return m;
}

std::vector<int> SymMat::support() const {
  std::vector<int> s;
  for (const auto& e : entries_) {
    s.push_back(e.row);
    s.push_back(e.col);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

SymMat SymMat::scaled(double factor) const {
  std::vector<Entry> e(entries_);
  for (auto& x : e) x.value *= factor;
  return from_entries(n_, e);
}

SymMat operator+(const SymMat& a, const SymMat& b) {
  if (a.n_ != b.n_) throw DomainError("dimension mismatch in SymMat addition");
  std::vector<Entry> e(a.entries_);
  e.insert(e.end(), b.entries_.begin(), b.entries_.end());
  SymMat m(a.n_);
  m.entries_ = canonicalize(std::move(e));
  return m;
}

SymMat operator-(const SymMat& a, const SymMat& b) { return a + b.scaled(-1.0); }

SymMat restrict(const SymMat& a, std::span<const int> index) {
  std::vector<int> idx(index.begin(), index.end());
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw DomainError("restriction index set has duplicates");
  }
  if (idx.empty()) throw DomainError("restriction to an empty index set");
  std::vector<int> local(static_cast<std::size_t>(a.dim()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    check_index(idx[k], a.dim());
    local[idx[k]] = static_cast<int>(k);
  }
  std::vector<Entry> e;
  for (const auto& x : a.entries()) {
    const int r = local[x.row];
    const int c = local[x.col];
    if (r >= 0 && c >= 0) e.push_back({r, c, x.value});
  }
  return SymMat::from_entries(static_cast<int>(idx.size()), e);
}

SymMat embed(const SymMat& local, std::span<const int> index, int n) {
  if (static_cast<int>(index.size()) != local.dim()) {
    throw DomainError("embedding index size does not match matrix dimension");
  }
  std::vector<Entry> e;
  e.reserve(local.nnz());
  for (const auto& x : local.entries()) {
    e.push_back({index[x.row], index[x.col], x.value});
  }
  return SymMat::from_entries(n, e);
}

}  // namespace arrowsdp
