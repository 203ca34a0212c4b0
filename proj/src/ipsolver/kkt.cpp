#include <algorithm>
#include <cmath>

#include "arrowsdp/ipsolver.hpp"

namespace arrowsdp::ipm {

KktResiduals kkt_residuals(const sdp::SdoProblem& problem, std::span<const double> y,
                           std::span<const Eigen::MatrixXd> dual,
                           std::span<const Eigen::MatrixXd> face) {
  const sdp::SdoProblem conic = sdp::to_conic(problem);
  if (static_cast<int>(y.size()) != conic.n_vars()) {
    throw DomainError("primal point has the wrong length");
  }
  if (dual.size() != conic.blocks.size()) {
    throw DomainError("one dual matrix per conic block is required");
  }
  if (!face.empty() && face.size() != conic.blocks.size()) {
    throw DomainError("one face basis per conic block is required");
  }
  Eigen::VectorXd rd = Eigen::Map<const Eigen::VectorXd>(conic.objective.data(),
                                                         conic.n_vars());
  const double c_norm = rd.norm();
  double c0_norm = 0.0, x_norm = 0.0;
  double primal_violation = 0.0, dual_violation = 0.0, dobj = 0.0, xs = 0.0;
  for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
    const auto& blk = conic.blocks[b];
    const auto& xb = dual[b];
    Eigen::MatrixXd x;
    if (blk.diagonal) {
      if (xb.rows() != blk.dim || xb.cols() != 1) {
        throw DomainError("dual of a diagonal block must be a dim x 1 column");
      }
      x = xb.col(0).asDiagonal();
    } else {
      if (xb.rows() != blk.dim || xb.cols() != blk.dim) {
        throw DomainError("dual of a PSD block must be dim x dim");
      }
      x = 0.5 * (xb + xb.transpose());
    }
    const Eigen::MatrixXd f = conic.evaluate(static_cast<int>(b), y).to_dense();
    const Eigen::MatrixXd c0 = blk.constant.to_dense();
    c0_norm = std::max(c0_norm, c0.norm());
    x_norm = std::max(x_norm, x.norm());
    double fmin, xmin;
    if (blk.diagonal) {
      fmin = f.diagonal().minCoeff();
      xmin = x.diagonal().minCoeff();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(f, Eigen::EigenvaluesOnly);
      fmin = ef.eigenvalues()(0);
      Eigen::MatrixXd xc = x;
      if (!face.empty() && face[b].cols() > 0) {
        if (face[b].rows() != blk.dim) throw DomainError("face basis has the wrong number of rows");
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(face[b]);
        const Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd w = q.rightCols(blk.dim - face[b].cols());
        xc = w.transpose() * x * w;
      }
      xmin = xc.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(xc, Eigen::EigenvaluesOnly)
                             .eigenvalues()(0)
                       : 0.0;
    }
    primal_violation = std::max(primal_violation, -fmin);
    dual_violation = std::max(dual_violation, -xmin);
    dobj -= c0.cwiseProduct(x).sum();
    xs += f.cwiseProduct(x).sum();
    for (const auto& [j, a] : blk.terms) rd(j) -= a.to_dense().cwiseProduct(x).sum();
  }
  const double pobj = conic.objective_value(y);
  KktResiduals r;
  r.primal = std::max(0.0, primal_violation) / (1.0 + c0_norm);
  r.dual = rd.norm() / (1.0 + c_norm) + std::max(0.0, dual_violation) / (1.0 + x_norm);
  r.complementarity = std::abs(xs) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

KktResiduals kkt_residuals(const sdp::SdoProblem& problem, const SolveReport& report) {
  return kkt_residuals(problem, report.x, report.dual, report.face);
}

}  // namespace arrowsdp::ipm
