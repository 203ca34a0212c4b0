#include <algorithm>
#include <cmath>

#include "arrowsdp/matcore.hpp"

namespace arrowsdp {

bool is_psd(const Eigen::MatrixXd& a, double tol) {
  if (tol < 0) throw DomainError("negative PSD tolerance");
  if (a.rows() != a.cols()) throw DomainError("matrix is not square");
  if (!a.allFinite()) throw DomainError("non-finite matrix entry");
  if (a.rows() == 0) return true;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  const double shift = tol * std::max(1.0, norm);
  // lambda_min(A) >= -shift  <=>  A + shift*I is PSD; the Cholesky test on
  // A + 2*shift*I is used so that the boundary case stays decidable in
  // floating point. Matrices within a factor 2 of the bound are resolved by
  // an eigenvalue computation.
  Eigen::MatrixXd shifted = a;
  shifted.diagonal().array() += 2.0 * shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) return false;
  shifted.diagonal().array() -= shift;
  if (Eigen::LLT<Eigen::MatrixXd>(shifted).info() == Eigen::Success) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -shift;
}

bool is_psd(const SymMat& a, double tol) {
  return is_psd(a.to_dense(), tol);
}

double min_eigenvalue(const SymMat& a) {
  const auto sup = a.support();
  if (sup.empty()) return 0.0;
  const Eigen::MatrixXd d = restrict(a, sup).to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace arrowsdp
