#include <cmath>

#include "arrowsdp/fem2d.hpp"

namespace arrowsdp::fem2d {

SymMat element_stiffness(const FemConfig& cfg) {
  const double e = cfg.young_modulus;
  const double nu = cfg.poisson_ratio;
  if (!(nu > -1.0 && nu < 0.5)) throw DomainError("poisson_ratio must lie in (-1, 0.5)");
  if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("young_modulus must be positive");

  Eigen::Matrix3d d;
  d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
  d *= e / (1.0 - nu * nu);

  // Reference square [-1,1]^2 mapped to the unit square: Jacobian I/2.
  const double xi_n[4] = {-1.0, 1.0, 1.0, -1.0};
  const double eta_n[4] = {-1.0, -1.0, 1.0, 1.0};
  const double g = 1.0 / std::sqrt(3.0);
  const double det_j = 0.25;

  Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
  for (double xi : {-g, g}) {
    for (double eta : {-g, g}) {
      Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        const double dx = 0.25 * xi_n[a] * (1.0 + eta_n[a] * eta) * 2.0;
        const double dy = 0.25 * eta_n[a] * (1.0 + xi_n[a] * xi) * 2.0;
        b(0, 2 * a) = dx;
        b(1, 2 * a + 1) = dy;
        b(2, 2 * a) = dy;
        b(2, 2 * a + 1) = dx;
      }
      k += b.transpose() * d * b * det_j;
    }
  }
  return SymMat::from_dense(0.5 * (k + k.transpose()));
}

}  // namespace arrowsdp::fem2d
