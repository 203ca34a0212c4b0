#include <algorithm>
#include <cmath>

#include "arrowsdp/decomp.hpp"

namespace arrowsdp::decomp {

SplitReport verify_split(const SymMat& original, std::span<const SymMat> blocks,
                         VerifyTolerances tol) {
  const int n = original.dim();
  SymMat total(n);
  SplitReport rep;
  rep.min_eigenvalue = blocks.empty() ? 0.0 : INFINITY;
  for (const auto& b : blocks) {
    if (b.dim() != n) throw DomainError("block dimension differs from original");
    total = total + b;
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_eigenvalue(b));
  }
  rep.max_residual = (total - original).max_abs();
  const double norm = original.norm_inf();
  rep.scale = norm > 0.0 ? norm : 1.0;
  rep.sum_ok = rep.max_residual <= tol.sum * rep.scale;
  rep.psd_ok = rep.min_eigenvalue >= -tol.psd * rep.scale;
  rep.passed = rep.sum_ok && rep.psd_ok;
  return rep;
}

}  // namespace arrowsdp::decomp
